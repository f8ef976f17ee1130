#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace mrt::cli {

/// `%.10g`, the canonical numeric format of every CSV.
std::string fmt_num(double v);

/// Buffers a headered CSV and writes it in one go (LF line endings).
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& num(double v);
  CsvTable& integer(long long v);
  CsvTable& text(const std::string& s);

  std::string str() const;

 private:
  void sep();

  std::size_t width_;
  std::size_t filled_ = 0;
  std::string body_;
};

/// Collects the files of one command under an output directory.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  void write(const std::string& name, const std::string& contents);
  void write_csv(const std::string& name, const CsvTable& t) { write(name, t.str()); }

  const std::vector<std::string>& written() const noexcept { return written_; }
  const std::filesystem::path& path() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

/// Binary PPM (P6) heatmap of values in [lo, hi], row 0 = first y.
/// Colormap: linear blend dark blue (0,0,128) -> white -> dark red (128,0,0).
std::string render_heatmap(const std::vector<double>& values, int n_cols, int n_rows, double lo,
                           double hi, int cell_pixels = 4);

}  // namespace mrt::cli
