#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "stsq/types.hpp"

namespace stsq {

using Json = nlohmann::ordered_json;

// Round-trip-safe decimal rendering used everywhere a number becomes text.
std::string format_number(double v);

class CsvWriter {
   public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<std::string>& cells);
    void add_numeric_row(const std::vector<double>& cells);
    const std::string& str() const { return buffer_; }

   private:
    std::size_t width_;
    std::string buffer_;
};

// Top-level JSON object with the schema identifier and run metadata filled in.
Json make_envelope(const std::string& command);

Json axis_to_json(const Axis& axis);
Json moments_to_json(const StokesMoments& m);
Json flags_to_json(const CriteriaFlags& f);
Json squeezing_report_to_json(const SqueezingReport& r);
Json window_to_json(const SqueezingWindow& w);
Json minimum_to_json(const MinimumResult& m);

std::string dump_json(const Json& j);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace stsq
