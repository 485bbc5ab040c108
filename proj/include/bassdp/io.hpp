#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace bassdp {

// 17 significant digits: doubles survive a write/parse round trip.
std::string fmt17(double v);

void ensure_dir(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    CsvWriter& cell(double v);
    CsvWriter& cell(std::int64_t v);
    CsvWriter& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
    CsvWriter& cell(const std::string& v);
    void end_row();

  private:
    std::ofstream out_;
    bool row_open_ = false;
};

}  // namespace bassdp
