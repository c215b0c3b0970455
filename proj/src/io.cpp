#include "ldplab/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "field serialization assumes a little-endian host");

namespace ldplab {

namespace {

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("field read: truncated stream");
    return v;
}

} // namespace

void write_field(std::ostream& os, const SpectralField& f, double time) {
    const TorusGrid& g = f.grid();
    os.write("LDPF", 4);
    put<uint32_t>(os, static_cast<uint32_t>(g.n));
    put<double>(os, g.period);
    put<uint32_t>(os, static_cast<uint32_t>(g.components));
    put<double>(os, time);
    const auto vals = f.to_physical();
    os.write(reinterpret_cast<const char*>(vals.data()),
             static_cast<std::streamsize>(vals.size() * sizeof(double)));
}

SpectralField read_field(std::istream& is, double* time_out) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "LDPF", 4) != 0)
        throw std::runtime_error("field read: bad magic");
    const auto n = static_cast<int>(get<uint32_t>(is));
    const double period = get<double>(is);
    const auto components = static_cast<int>(get<uint32_t>(is));
    const double time = get<double>(is);
    const TorusGrid g = TorusGrid::make(n, period, components);
    std::vector<double> vals(static_cast<size_t>(g.points()) * components);
    is.read(reinterpret_cast<char*>(vals.data()),
            static_cast<std::streamsize>(vals.size() * sizeof(double)));
    if (!is) throw std::runtime_error("field read: truncated payload");
    if (time_out) *time_out = time;
    return SpectralField::from_physical(g, vals);
}

void write_field_file(const std::string& path, const SpectralField& f, double time) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    write_field(os, f, time);
}

SpectralField read_field_file(const std::string& path, double* time_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for read: " + path);
    return read_field(is, time_out);
}

void write_trajectory_file(const std::string& path, const Trajectory& traj) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    for (size_t j = 0; j < traj.size(); ++j)
        write_field(os, traj.states[j], traj.times[j]);
}

Trajectory read_trajectory_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for read: " + path);
    std::vector<double> times;
    std::vector<SpectralField> states;
    while (is.peek() != EOF) {
        double t = 0;
        states.push_back(read_field(is, &t));
        times.push_back(t);
    }
    if (times.empty()) throw std::runtime_error("trajectory read: empty file");
    const double dt = times.size() > 1 ? times[1] - times[0] : 1.0;
    return Trajectory::make(std::move(times), std::move(states), dt);
}

void write_field_csv(const std::string& path, const SpectralField& f) {
    const TorusGrid& g = f.grid();
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << "x1,x2";
    for (int c = 0; c < g.components; ++c) os << ",c" << c;
    os << "\n";
    std::vector<std::vector<double>> vals;
    for (int c = 0; c < g.components; ++c) vals.push_back(f.to_physical(c));
    char buf[64];
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", i1 * g.dx(), i2 * g.dx());
            os << buf;
            for (int c = 0; c < g.components; ++c) {
                std::snprintf(buf, sizeof buf, ",%.17g", vals[c][static_cast<size_t>(i2) * g.n + i1]);
                os << buf;
            }
            os << "\n";
        }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for read: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace ldplab
