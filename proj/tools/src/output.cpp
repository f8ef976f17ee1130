#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mrt/error.hpp"

namespace mrt::cli {

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";  // glibc would print the sign bit as "-nan"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) body_ += ',';
    body_ += header[i];
  }
  filled_ = width_;
}

void CsvTable::sep() {
  if (filled_ >= width_) throw ComputationError("CsvTable: row overflow");
  if (filled_) body_ += ',';
  ++filled_;
}

CsvTable& CsvTable::row() {
  if (filled_ != width_) throw ComputationError("CsvTable: incomplete row");
  body_ += '\n';
  filled_ = 0;
  return *this;
}

CsvTable& CsvTable::num(double v) {
  sep();
  body_ += fmt_num(v);
  return *this;
}

CsvTable& CsvTable::integer(long long v) {
  sep();
  body_ += std::to_string(v);
  return *this;
}

CsvTable& CsvTable::text(const std::string& s) {
  sep();
  body_ += s;
  return *this;
}

std::string CsvTable::str() const {
  if (filled_ != width_) throw ComputationError("CsvTable: incomplete row");
  return body_ + '\n';
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_))
    throw IoError("cannot create output directory " + dir_.string() +
                  (ec ? ": " + ec.message() : std::string()));
}

void OutputDir::write(const std::string& name, const std::string& contents) {
  const std::filesystem::path p = dir_ / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw IoError("failed writing " + p.string());
  written_.push_back(name);
}

std::string render_heatmap(const std::vector<double>& values, int n_cols, int n_rows, double lo,
                           double hi, int cell_pixels) {
  const int w = n_cols * cell_pixels;
  const int h = n_rows * cell_pixels;
  std::string img = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  const std::size_t header = img.size();
  img.resize(header + static_cast<std::size_t>(w) * h * 3);
  auto color = [&](double v, unsigned char* px) {
    double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
    double r, g, b;
    if (t < 0.5) {
      const double s = t / 0.5;
      r = 255 * s;
      g = 255 * s;
      b = 128 + 127 * s;
    } else {
      const double s = (t - 0.5) / 0.5;
      r = 255 - 127 * s;
      g = 255 * (1 - s);
      b = 255 * (1 - s);
    }
    px[0] = static_cast<unsigned char>(std::lround(r));
    px[1] = static_cast<unsigned char>(std::lround(g));
    px[2] = static_cast<unsigned char>(std::lround(b));
  };
  auto* data = reinterpret_cast<unsigned char*>(img.data() + header);
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const std::size_t cell = static_cast<std::size_t>(row / cell_pixels) * n_cols + col / cell_pixels;
      color(values.at(cell), data + (static_cast<std::size_t>(row) * w + col) * 3);
    }
  }
  return img;
}

}  // namespace mrt::cli
