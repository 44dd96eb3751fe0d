#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "mrham/signal.hpp"
#include "mrham/simulate.hpp"
#include "mrham/sysid.hpp"
#include "mrham/types.hpp"

namespace mrham {

using ordered_json = nlohmann::ordered_json;

namespace detail {

// Shortest decimal form that parses back to the same double, so repeated
// runs produce byte-identical files.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text, const char* what) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin != end && (*begin == ' ' || *begin == '\t'))
        ++begin;
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc())
        throw std::runtime_error(std::string("cannot parse ") + what + ": '" + text + "'");
    return value;
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ','))
        out.push_back(field);
    return out;
}

}  // namespace detail

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream file(path);
    if (!file)
        throw std::runtime_error("cannot open for writing: " + path);
    file << content;
    if (!file)
        throw std::runtime_error("write failed: " + path);
}

inline std::string read_text(const std::string& path) {
    std::ifstream file(path);
    if (!file)
        throw std::runtime_error("cannot open: " + path);
    std::ostringstream content;
    content << file.rdbuf();
    return content.str();
}

inline void write_json(const std::string& path, const ordered_json& value) {
    write_text(path, value.dump(2) + "\n");
}

inline ordered_json read_json(const std::string& path) {
    try {
        return ordered_json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad JSON in " + path + ": " + e.what());
    }
}

// Equal-length columns with a header row; the workhorse for all CSV output.
inline void write_csv(const std::string& path, const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& columns) {
    if (headers.empty() || headers.size() != columns.size())
        throw std::invalid_argument("write_csv: header/column mismatch");
    for (const auto& col : columns)
        if (col.size() != columns.front().size())
            throw std::invalid_argument("write_csv: ragged columns");

    std::string out;
    for (std::size_t c = 0; c < headers.size(); ++c)
        out += (c ? "," : "") + headers[c];
    out += '\n';
    for (std::size_t r = 0; r < columns.front().size(); ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c)
                out += ',';
            out += detail::format_double(columns[c][r]);
        }
        out += '\n';
    }
    write_text(path, out);
}

// CSV `t,value` plus a `<path>.meta.json` sidecar carrying the unit and the
// exact sample period.
inline void write_time_series(const std::string& path, const TimeSeries& series,
                              const std::string& unit) {
    series.validate();
    std::vector<double> t(series.values.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = static_cast<double>(i) * series.sample_period;
    write_csv(path, {"t", "value"}, {t, series.values});

    ordered_json meta;
    meta["unit"] = unit;
    meta["sample_period"] = series.sample_period;
    write_json(path + ".meta.json", meta);
}

// Reads a `t,value` CSV; the sample period comes from the sidecar when
// present, otherwise from the first time increment.
inline TimeSeries read_time_series(const std::string& path) {
    std::istringstream file(read_text(path));
    std::string line;
    if (!std::getline(file, line) || line != "t,value")
        throw std::runtime_error(path + ": expected header 't,value'");

    std::vector<double> t, values;
    while (std::getline(file, line)) {
        if (line.empty())
            continue;
        const auto fields = detail::split_line(line);
        if (fields.size() != 2)
            throw std::runtime_error(path + ": expected two columns");
        t.push_back(detail::parse_double(fields[0], "time"));
        values.push_back(detail::parse_double(fields[1], "value"));
    }
    if (t.size() < 2)
        throw std::runtime_error(path + ": need at least two samples");

    TimeSeries series;
    std::ifstream sidecar(path + ".meta.json");
    if (sidecar) {
        std::ostringstream content;
        content << sidecar.rdbuf();
        try {
            series.sample_period = ordered_json::parse(content.str()).at("sample_period");
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("bad JSON in " + path + ".meta.json: " + e.what());
        }
    } else {
        series.sample_period = t[1] - t[0];
    }
    for (std::size_t i = 0; i < t.size(); ++i)
        if (std::abs(t[i] - static_cast<double>(i) * series.sample_period) >
            1e-6 * std::max(1.0, std::abs(t[i])))
            throw std::runtime_error(path + ": non-uniform time grid");
    series.values = std::move(values);
    series.validate();
    return series;
}

inline void write_static_csv(const std::string& path, const StaticCharacteristic& statics) {
    statics.validate();
    std::vector<double> u, y;
    for (const auto& p : statics.points) {
        u.push_back(p.voltage);
        y.push_back(p.displacement);
    }
    write_csv(path, {"U", "Y"}, {u, y});
}

inline StaticCharacteristic read_static_csv(const std::string& path) {
    std::istringstream file(read_text(path));
    std::string line;
    if (!std::getline(file, line) || line != "U,Y")
        throw std::runtime_error(path + ": expected header 'U,Y'");

    StaticCharacteristic statics;
    while (std::getline(file, line)) {
        if (line.empty())
            continue;
        const auto fields = detail::split_line(line);
        if (fields.size() != 2)
            throw std::runtime_error(path + ": expected two columns");
        statics.points.push_back({detail::parse_double(fields[0], "voltage"),
                                  detail::parse_double(fields[1], "displacement")});
    }
    statics.validate();
    return statics;
}

inline void write_records_json(const std::string& path, const std::vector<StepRecord>& records) {
    ordered_json out = ordered_json::array();
    for (const auto& rec : records) {
        ordered_json item;
        item["u_pre"] = rec.u_pre;
        item["u_post"] = rec.u_post;
        item["sample_period"] = rec.sample_period;
        item["delta_y"] = rec.delta_y;
        out.push_back(std::move(item));
    }
    write_json(path, out);
}

inline std::vector<StepRecord> read_records_json(const std::string& path) {
    const auto parsed = read_json(path);
    if (!parsed.is_array())
        throw std::runtime_error(path + ": expected a JSON array of records");
    std::vector<StepRecord> records;
    try {
        for (const auto& item : parsed) {
            StepRecord rec;
            rec.u_pre = item.at("u_pre");
            rec.u_post = item.at("u_post");
            rec.sample_period = item.at("sample_period");
            rec.delta_y = item.at("delta_y").get<std::vector<double>>();
            records.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad record in " + path + ": " + e.what());
    }
    return records;
}

inline ordered_json model_to_json(const HammersteinModel& model) {
    ordered_json out;
    out["poly"] = model.nonlinearity.coefficients;
    out["fast"] = {{"k", model.fast.gain},
                   {"alpha", model.fast.decay_rate},
                   {"omega", model.fast.damped_frequency}};
    out["slow"] = {{"s0", model.slow.pole}, {"z0", model.slow.zero}};
    return out;
}

inline HammersteinModel model_from_json(const ordered_json& parsed, const std::string& origin) {
    HammersteinModel model;
    try {
        model.nonlinearity.coefficients = parsed.at("poly").get<std::vector<double>>();
        model.fast.gain = parsed.at("fast").at("k");
        model.fast.decay_rate = parsed.at("fast").at("alpha");
        model.fast.damped_frequency = parsed.at("fast").at("omega");
        model.slow.pole = parsed.at("slow").at("s0");
        model.slow.zero = parsed.at("slow").at("z0");
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad model in " + origin + ": " + e.what());
    }
    model.validate();
    return model;
}

inline void write_model_json(const std::string& path, const HammersteinModel& model) {
    write_json(path, model_to_json(model));
}

inline HammersteinModel read_model_json(const std::string& path) {
    return model_from_json(read_json(path), path);
}

inline ordered_json fit_report_to_json(const FitReport& report) {
    ordered_json out;
    out["fit_percent"] = report.fit_percent;
    out["l1"] = report.residual_l1;
    out["l2"] = report.residual_l2;
    return out;
}

inline void write_diagnostics_json(const std::string& path,
                                   const std::vector<RecordDiagnostic>& diagnostics) {
    ordered_json out = ordered_json::array();
    for (const auto& d : diagnostics) {
        ordered_json item;
        item["j"] = d.index;
        item["u_pre"] = d.u_pre;
        item["u_post"] = d.u_post;
        item["k"] = d.gain;
        item["alpha"] = d.decay_rate;
        item["omega"] = d.damped_frequency;
        item["s0"] = d.slow_pole;
        item["residual_fast"] = d.residual_fast;
        item["residual_slow"] = d.residual_slow;
        item["excluded"] = d.excluded;
        out.push_back(std::move(item));
    }
    write_json(path, out);
}

inline ordered_json baseline_to_json(const ThirdOrderTf& tf) {
    ordered_json out;
    out["b1"] = tf.b1;
    out["b0"] = tf.b0;
    out["a2"] = tf.a2;
    out["a1"] = tf.a1;
    out["a0"] = tf.a0;
    return out;
}

inline ThirdOrderTf baseline_from_json(const ordered_json& parsed, const std::string& origin) {
    try {
        return {parsed.at("b1"), parsed.at("b0"), parsed.at("a2"), parsed.at("a1"),
                parsed.at("a0")};
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad transfer function in " + origin + ": " + e.what());
    }
}

}  // namespace mrham
