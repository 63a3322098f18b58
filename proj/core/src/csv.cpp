#include "frontlab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "frontlab/error.hpp"

namespace frontlab {

std::string format_number(double value) {
  if (std::isnan(value)) return {};
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_number(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string{};
}

namespace {

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const SimulationTrace& trace) {
  auto out = open(path);
  out << "t,g,h,width,sup_I,mass,R0F\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_number(trace.t[i]) << ',' << format_number(trace.g[i]) << ',' << format_number(trace.h[i]) << ','
        << format_number(trace.width(i)) << ',' << format_number(trace.sup_I[i]) << ','
        << format_number(trace.mass[i]) << ',' << format_number(trace.r0f[i]) << '\n';
  }
}

void write_profiles_csv(const std::filesystem::path& path, const SimulationTrace& trace) {
  auto out = open(path);
  out << "t,x,I\n";
  for (const auto& s : trace.profiles) {
    for (int i = 0; i < s.n(); ++i) {
      out << format_number(s.t) << ',' << format_number(s.x(i)) << ','
          << format_number(s.I[static_cast<std::size_t>(i)]) << '\n';
    }
  }
}

void write_eigenfunction_csv(const std::filesystem::path& path, const FieldOnGrid& phi) {
  auto out = open(path);
  out << "x,phi\n";
  for (int i = 0; i < phi.grid.n; ++i) {
    out << format_number(phi.grid.x(i)) << ',' << format_number(phi.values[static_cast<std::size_t>(i)]) << '\n';
  }
}

void write_semiwave_profile_csv(const std::filesystem::path& path, const SemiWaveSolution& sol) {
  auto out = open(path);
  out << "x,t,q\n";
  for (std::size_t it = 0; it < sol.q_times.size(); ++it) {
    for (std::size_t ix = 0; ix < sol.xs.size(); ++ix) {
      out << format_number(sol.xs[ix]) << ',' << format_number(sol.q_times[it]) << ','
          << format_number(sol.profile(it, ix)) << '\n';
    }
  }
}

void write_semiwave_speed_csv(const std::filesystem::path& path, const SemiWaveSolution& sol) {
  auto out = open(path);
  out << "t,k\n";
  for (std::size_t j = 0; j < sol.k.size(); ++j) {
    out << format_number(sol.k_times[j]) << ',' << format_number(sol.k[j]) << '\n';
  }
}

}  // namespace frontlab
