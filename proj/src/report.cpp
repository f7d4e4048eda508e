#include "stsq/report.hpp"

#include <cstdio>
#include <fstream>

#include "stsq/errors.hpp"

namespace stsq {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
    if (header.empty()) throw InvalidInput("csv header must not be empty");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += csv_escape(header[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw InvalidInput("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += csv_escape(cells[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::add_numeric_row(const std::vector<double>& cells) {
    std::vector<std::string> text;
    text.reserve(cells.size());
    for (double v : cells) text.push_back(format_number(v));
    add_row(text);
}

Json make_envelope(const std::string& command) {
    Json j;
    j["schema"] = "stokes-squeeze/1";
    j["command"] = command;
    j["deterministic"] = true;
    return j;
}

Json axis_to_json(const Axis& axis) {
    return Json::array({axis.n().x(), axis.n().y(), axis.n().z()});
}

Json moments_to_json(const StokesMoments& m) {
    Json j;
    j["mean_s0"] = m.mean0;
    j["mean"] = Json::array({m.mean[0], m.mean[1], m.mean[2]});
    Json cov = Json::array();
    for (int r = 0; r < 3; ++r)
        cov.push_back(Json::array({m.cov(r, 0), m.cov(r, 1), m.cov(r, 2)}));
    j["cov"] = cov;
    j["mean_s0_sq"] = m.mean0_sq;
    j["variances"] = Json::array({m.v1(), m.v2(), m.v3()});
    return j;
}

Json flags_to_json(const CriteriaFlags& f) {
    Json j;
    j["thresholds"] = {{"total_mean", f.thr_total_mean},
                       {"coord_mean", f.thr_coord_mean},
                       {"complement", f.thr_complement},
                       {"complement_sq_over_total", f.thr_complement_sq_over_total}};
    j["below_total_mean"] = f.below_total_mean;
    j["below_coord_mean"] = f.below_coord_mean;
    j["coord_applicable"] = f.coord_applicable;
    j["below_complement"] = f.below_complement;
    j["below_complement_sq_over_total"] = f.below_complement_sq_over_total;
    return j;
}

Json squeezing_report_to_json(const SqueezingReport& r) {
    Json j;
    j["axis"] = axis_to_json(r.axis);
    j["variance"] = r.variance;
    j["denominator"] = r.denominator;
    j["factor"] = r.factor;
    j["degree"] = r.degree;
    j["squeezed"] = r.squeezed();
    j["criteria"] = flags_to_json(r.flags);
    return j;
}

Json window_to_json(const SqueezingWindow& w) {
    Json j;
    j["case"] = window_case_name(w.case_label);
    j["squeezable"] = w.squeezable;
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
    };
    put("kt_cross_1", w.t01);
    put("kt_cross_2", w.t02);
    put("kt_window_open", w.t1);
    put("kt_window_close", w.t2);
    return j;
}

Json minimum_to_json(const MinimumResult& m) {
    Json j;
    j["squeezed"] = m.squeezed;
    j["s2_min"] = m.s2_min;
    if (m.kt_min) j["kt_min"] = *m.kt_min;
    return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open output file: " + path);
    out << content;
    if (!out) throw InvalidInput("failed writing output file: " + path);
}

}  // namespace stsq
