#pragma once

// UTF-8 CSV with a header row. Reals are written with 17 significant digits
// so every value round-trips exactly.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace qiopa::cli {

std::string csv_real(double x);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& field(double x);
  CsvWriter& field(std::int64_t x);
  CsvWriter& field(std::uint64_t x);
  CsvWriter& field(bool x);
  CsvWriter& field(const std::string& x);
  void end_row();

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void separator();

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace qiopa::cli
