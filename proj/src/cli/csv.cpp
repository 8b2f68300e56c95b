#include "qiopa/cli/csv.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace qiopa::cli {

std::string csv_real(double x) { return fmt::format("{:.17g}", x); }

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  for (const auto& h : header) {
    field(h);
  }
  end_row();
}

void CsvWriter::separator() {
  if (in_row_ > 0) {
    out_ << ',';
  }
  ++in_row_;
}

CsvWriter& CsvWriter::field(double x) {
  separator();
  out_ << csv_real(x);
  return *this;
}

CsvWriter& CsvWriter::field(std::int64_t x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::field(bool x) {
  separator();
  out_ << (x ? "true" : "false");
  return *this;
}

CsvWriter& CsvWriter::field(const std::string& x) {
  separator();
  out_ << x;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error("row of " + std::to_string(in_row_) + " fields written to " +
                           path_.string() + " with " + std::to_string(columns_) + " columns");
  }
  out_ << '\n';
  in_row_ = 0;
  if (!out_) {
    throw std::runtime_error("write to " + path_.string() + " failed");
  }
}

}  // namespace qiopa::cli
