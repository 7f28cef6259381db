#ifndef LRLATTICE_REPORT_HPP
#define LRLATTICE_REPORT_HPP

// Deterministic report text: 17 significant digits, fixed ordering, files
// written to a temporary name and renamed into place.

#include <string>
#include <vector>

#include "json.hpp"

namespace lrl {

std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

// JSON with numbers rendered by format_double and keys in insertion order.
std::string render_json(const nlohmann::ordered_json& doc);

// Writes `content` to path.tmp then renames over path.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace lrl

#endif  // LRLATTICE_REPORT_HPP
