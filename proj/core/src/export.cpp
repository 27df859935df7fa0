#include "fsk/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "fsk/error.hpp"

namespace fsk {
namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

std::optional<ExportFormat> parse_export_format(std::string_view name) {
  if (name == "csv") return ExportFormat::csv;
  if (name == "pgm") return ExportFormat::pgm;
  if (name == "obj") return ExportFormat::obj;
  return std::nullopt;
}

const char* to_string(ExportFormat format) noexcept {
  switch (format) {
    case ExportFormat::csv: return "csv";
    case ExportFormat::pgm: return "pgm";
    case ExportFormat::obj: return "obj";
  }
  return "unknown";
}

std::string to_csv(const SampledField& field) {
  std::string out = "x,y,z\n";
  out.reserve(field.size() * 64);
  for (int iy = 0; iy < field.ny(); ++iy) {
    for (int ix = 0; ix < field.nx(); ++ix) {
      append_number(out, field.x(ix));
      out += ',';
      append_number(out, field.y(iy));
      out += ',';
      append_number(out, field.at(ix, iy));
      out += '\n';
    }
  }
  return out;
}

std::string to_pgm(const SampledField& field) {
  std::string out = "P5\n" + std::to_string(field.nx()) + " " + std::to_string(field.ny()) + "\n65535\n";
  const auto values = field.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double range = *hi - *lo;
  out.reserve(out.size() + 2 * values.size());
  for (double v : values) {
    unsigned level = 0;
    if (range > 0.0) level = static_cast<unsigned>(std::lround(std::clamp((v - min) / range, 0.0, 1.0) * 65535.0));
    out += static_cast<char>((level >> 8) & 0xFF);
    out += static_cast<char>(level & 0xFF);
  }
  return out;
}

std::string to_obj(const SampledField& field) {
  std::string out;
  out.reserve(field.size() * 64);
  for (int iy = 0; iy < field.ny(); ++iy) {
    for (int ix = 0; ix < field.nx(); ++ix) {
      out += "v ";
      append_number(out, field.x(ix));
      out += ' ';
      append_number(out, field.y(iy));
      out += ' ';
      append_number(out, field.at(ix, iy));
      out += '\n';
    }
  }
  auto id = [&field](int ix, int iy) { return std::to_string(field.index(ix, iy) + 1); };
  for (int iy = 0; iy + 1 < field.ny(); ++iy) {
    for (int ix = 0; ix + 1 < field.nx(); ++ix) {
      const std::string v00 = id(ix, iy);
      const std::string v10 = id(ix + 1, iy);
      const std::string v11 = id(ix + 1, iy + 1);
      const std::string v01 = id(ix, iy + 1);
      out += "f " + v00 + ' ' + v10 + ' ' + v11 + '\n';
      out += "f " + v00 + ' ' + v11 + ' ' + v01 + '\n';
    }
  }
  return out;
}

std::string render(const SampledField& field, ExportFormat format) {
  switch (format) {
    case ExportFormat::csv: return to_csv(field);
    case ExportFormat::pgm: return to_pgm(field);
    case ExportFormat::obj: return to_obj(field);
  }
  return {};
}

void export_field(const SampledField& field, ExportFormat format, const std::filesystem::path& path) {
  const std::string data = render(field, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

SampledField read_csv_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "x,y,z") throw Error(Errc::parse_error, path.string() + ": missing x,y,z header");
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> zs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    char c1 = 0;
    char c2 = 0;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    if (!(fields >> x >> c1 >> y >> c2 >> z) || c1 != ',' || c2 != ',')
      throw Error(Errc::parse_error, path.string() + ":" + std::to_string(row) + ": malformed row");
    if (ys.empty() || y != ys.back()) ys.push_back(y);
    if (ys.size() == 1) xs.push_back(x);
    zs.push_back(z);
  }
  if (xs.empty() || zs.size() != xs.size() * ys.size())
    throw Error(Errc::parse_error, path.string() + ": rows do not form a tensor grid");
  return SampledField(std::move(xs), std::move(ys), std::move(zs));
}

}  // namespace fsk
