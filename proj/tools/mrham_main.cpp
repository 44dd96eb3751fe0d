// Command-line front end for the Hammerstein actuator toolkit: synthetic
// data generation, staged identification, flat-baseline comparison, model
// validation, and frequency-response export. All outputs are deterministic
// for a fixed config and seed.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mrham/io.hpp"
#include "mrham/polyfit.hpp"
#include "mrham/response.hpp"
#include "mrham/signal.hpp"
#include "mrham/simulate.hpp"
#include "mrham/sysid.hpp"

namespace {

using mrham::ordered_json;

struct Options {
    std::string config;
    std::string model;
    std::string out = ".";
    std::vector<std::string> records;
    std::vector<std::string> statics;
    std::string input;
    std::string measured;
    double sigma = 0.0;
    std::uint64_t seed = 1;
    double hold = 20.0;
    double fast_window = 0.3;
    std::vector<int> degrees = {1, 2, 3, 4, 5};
    double sample_period = 1e-3;
    bool chirp = false;
};

struct OptionHandles {
    CLI::Option* model = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* records = nullptr;
    CLI::Option* statics = nullptr;
    CLI::Option* input = nullptr;
    CLI::Option* measured = nullptr;
    CLI::Option* sigma = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* hold = nullptr;
    CLI::Option* fast_window = nullptr;
    CLI::Option* degrees = nullptr;
    CLI::Option* sample_period = nullptr;
    CLI::Option* chirp = nullptr;
};

// Every subcommand shares the same flag vocabulary; unused flags are ignored
// by the handlers that do not need them.
OptionHandles add_options(CLI::App* cmd, Options& opts) {
    OptionHandles h;
    cmd->add_option("--config", opts.config, "JSON file supplying any flag; flags override it");
    h.model = cmd->add_option("--model", opts.model, "model JSON path");
    h.out = cmd->add_option("--out", opts.out, "output directory");
    h.records = cmd->add_option("--records", opts.records,
                                "step-record JSON path (repeatable for pooled baseline)");
    h.statics = cmd->add_option("--statics", opts.statics,
                                "static characteristic CSV path (pairs with --records)");
    h.input = cmd->add_option("--input", opts.input, "input time-series CSV path");
    h.measured = cmd->add_option("--measured", opts.measured, "measured time-series CSV path");
    h.sigma = cmd->add_option("--sigma", opts.sigma, "measurement noise sigma, mm");
    h.seed = cmd->add_option("--seed", opts.seed, "noise seed");
    h.hold = cmd->add_option("--hold", opts.hold, "seconds each excitation level is held");
    h.fast_window = cmd->add_option("--fast-window", opts.fast_window,
                                    "seconds of each record used for the fast fit");
    h.degrees = cmd->add_option("--degrees", opts.degrees, "candidate polynomial degrees")
                    ->delimiter(',');
    h.sample_period = cmd->add_option("--sample-period", opts.sample_period, "seconds per sample");
    h.chirp = cmd->add_flag("--chirp", opts.chirp, "also write a chirp data set (generate)");
    return h;
}

template <typename T>
void take(const ordered_json& cfg, const char* key, const CLI::Option* opt, T& target) {
    if (opt->count() == 0 && cfg.contains(key))
        target = cfg.at(key).get<T>();
}

// Path lists may be a single string or an array in the config file.
void take_paths(const ordered_json& cfg, const char* key, const CLI::Option* opt,
                std::vector<std::string>& target) {
    if (opt->count() != 0 || !cfg.contains(key))
        return;
    const auto& value = cfg.at(key);
    if (value.is_string())
        target = {value.get<std::string>()};
    else
        target = value.get<std::vector<std::string>>();
}

// Config JSON keys mirror the long flag names; explicitly passed flags win.
void merge_config(const Options& parsed, const OptionHandles& h, Options& opts) {
    if (parsed.config.empty())
        return;
    const auto cfg = mrham::read_json(parsed.config);
    take(cfg, "model", h.model, opts.model);
    take(cfg, "out", h.out, opts.out);
    take_paths(cfg, "records", h.records, opts.records);
    take_paths(cfg, "statics", h.statics, opts.statics);
    take(cfg, "input", h.input, opts.input);
    take(cfg, "measured", h.measured, opts.measured);
    take(cfg, "sigma", h.sigma, opts.sigma);
    take(cfg, "seed", h.seed, opts.seed);
    take(cfg, "hold", h.hold, opts.hold);
    take(cfg, "fast-window", h.fast_window, opts.fast_window);
    take(cfg, "sample-period", h.sample_period, opts.sample_period);
    take(cfg, "chirp", h.chirp, opts.chirp);
    if (h.degrees->count() == 0 && cfg.contains("degrees")) {
        const auto& d = cfg.at("degrees");
        if (d.is_string()) {
            opts.degrees.clear();
            std::istringstream stream(d.get<std::string>());
            std::string field;
            while (std::getline(stream, field, ','))
                opts.degrees.push_back(std::stoi(field));
        } else {
            opts.degrees = d.get<std::vector<int>>();
        }
    }
}

std::string out_path(const Options& opts, const std::string& name) {
    std::filesystem::create_directories(opts.out);
    return (std::filesystem::path(opts.out) / name).string();
}

void require(const std::string& value, const char* flag) {
    if (value.empty())
        throw std::runtime_error(std::string("missing required option ") + flag);
}

std::vector<double> time_column(std::size_t count, double dt) {
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i)
        t[i] = static_cast<double>(i) * dt;
    return t;
}

// Mean of the last `window` seconds of the initial hold, the noise-robust
// rest displacement used to anchor the extracted static curve.
double rest_displacement(const mrham::TimeSeries& response, double hold, double window) {
    const auto hold_samples =
        static_cast<std::size_t>(std::lround(hold / response.sample_period));
    const auto win_samples = std::max<std::size_t>(
        1, static_cast<std::size_t>(window / response.sample_period));
    const auto end = std::min(hold_samples, response.values.size());
    const auto begin = end > win_samples ? end - win_samples : 0;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i)
        sum += response.values[i];
    return sum / static_cast<double>(end - begin);
}

int cmd_generate(const Options& opts) {
    require(opts.model, "--model");
    const auto model = mrham::read_model_json(opts.model);

    const auto schedule = mrham::default_step_schedule(opts.hold);
    const auto input = mrham::make_step_excitation(schedule, opts.sample_period);
    const auto clean = mrham::simulate(model, input, model.offset());
    const auto response = mrham::add_noise(clean, opts.sigma, opts.seed);
    const auto records = mrham::split_steps(input, response, 0.5 * opts.hold);

    mrham::write_time_series(out_path(opts, "input.csv"), input, "V");
    mrham::write_time_series(out_path(opts, "response.csv"), response, "mm");
    mrham::write_records_json(out_path(opts, "records.json"), records);

    // Exact static curve on the schedule's level set, for round-trip use.
    auto levels = schedule.levels;
    std::sort(levels.begin(), levels.end());
    mrham::StaticCharacteristic statics;
    for (double u : levels)
        statics.points.push_back({u, mrham::eval_nonlinearity(model.nonlinearity, u)});
    mrham::write_static_csv(out_path(opts, "static.csv"), statics);

    // Companion curve extracted from the records, as a real workflow would.
    // The averaging window shrinks with short holds so it always fits inside
    // a record.
    const double window = std::min(2.0, 0.5 * opts.hold);
    const double offset = rest_displacement(response, opts.hold, window);
    const auto extracted = mrham::steady_state_points(records, window, offset);
    mrham::write_static_csv(out_path(opts, "static_extracted.csv"), extracted);

    if (opts.chirp) {
        const auto sweep = mrham::make_chirp(0.1, 80.0, 30.0, 6.0, opts.sample_period, 0.0);
        const auto chirp_clean = mrham::simulate(model, sweep, model.offset());
        const auto chirp_noisy = mrham::add_noise(chirp_clean, opts.sigma, opts.seed + 1);
        mrham::write_time_series(out_path(opts, "chirp_input.csv"), sweep, "V");
        mrham::write_time_series(out_path(opts, "chirp_response.csv"), chirp_noisy, "mm");
    }
    return 0;
}

int cmd_identify(const Options& opts) {
    if (opts.records.size() != 1 || opts.statics.size() != 1)
        throw std::runtime_error("identify needs exactly one --records and one --statics");
    const auto records = mrham::read_records_json(opts.records.front());
    const auto statics = mrham::read_static_csv(opts.statics.front());

    const auto result =
        mrham::identify(records, statics, opts.degrees, opts.fast_window, {});
    mrham::write_model_json(out_path(opts, "model.json"), result.model);
    mrham::write_diagnostics_json(out_path(opts, "diagnostics.json"), result.diagnostics);

    ordered_json reports = ordered_json::array();
    for (const auto& rep : result.reports)
        reports.push_back(mrham::fit_report_to_json(rep));
    mrham::write_json(out_path(opts, "reports.json"), reports);

    // Per-record overlays: the measurement against the two fitted stages.
    const auto& model = result.model;
    for (std::size_t j = 0; j < records.size(); ++j) {
        const auto& rec = records[j];
        const double dv = mrham::eval_nonlinearity(model.nonlinearity, rec.u_post) -
                          mrham::eval_nonlinearity(model.nonlinearity, rec.u_pre);
        std::vector<double> fast(rec.delta_y.size()), slow(rec.delta_y.size());
        for (std::size_t i = 0; i < rec.delta_y.size(); ++i) {
            const double t = static_cast<double>(i) * rec.sample_period;
            fast[i] = dv * mrham::step_response_fast(model.fast, t);
            slow[i] = dv * model.fast.gain * mrham::step_response_slow(model.slow, t);
        }
        char name[32];
        std::snprintf(name, sizeof(name), "overlay_%02zu.csv", j);
        mrham::write_csv(out_path(opts, name), {"t", "measured", "fitted_fast", "fitted_slow"},
                         {time_column(rec.delta_y.size(), rec.sample_period), rec.delta_y, fast,
                          slow});
    }
    return 0;
}

int cmd_validate(const Options& opts) {
    require(opts.model, "--model");
    require(opts.input, "--input");
    require(opts.measured, "--measured");
    const auto model = mrham::read_model_json(opts.model);
    const auto input = mrham::read_time_series(opts.input);
    const auto measured = mrham::read_time_series(opts.measured);

    const auto report = mrham::validate_model(model, input, measured);
    const auto predicted = mrham::simulate(model, input, measured.values.front());

    mrham::write_json(out_path(opts, "report.json"), mrham::fit_report_to_json(report));
    mrham::write_csv(out_path(opts, "overlay.csv"), {"t", "measured", "predicted"},
                     {time_column(measured.values.size(), measured.sample_period),
                      measured.values, predicted.values});
    return 0;
}

int cmd_bode(const Options& opts) {
    require(opts.model, "--model");
    const auto model = mrham::read_model_json(opts.model);

    const int count = 400;
    std::vector<double> omega(count);
    for (int i = 0; i < count; ++i)
        omega[i] = 1e-3 * std::pow(1e7, static_cast<double>(i) / (count - 1));
    const auto fr = mrham::frequency_response(model.fast, model.slow, omega);

    std::vector<std::vector<double>> cols(7, std::vector<double>(count));
    for (int i = 0; i < count; ++i) {
        cols[0][i] = fr.omega[i];
        cols[1][i] = fr.fast[i].magnitude;
        cols[2][i] = fr.fast[i].phase;
        cols[3][i] = fr.slow[i].magnitude;
        cols[4][i] = fr.slow[i].phase;
        cols[5][i] = fr.total[i].magnitude;
        cols[6][i] = fr.total[i].phase;
    }
    mrham::write_csv(out_path(opts, "bode.csv"),
                     {"omega", "mag_fast", "phase_fast", "mag_slow", "phase_slow", "mag_total",
                      "phase_total"},
                     cols);
    return 0;
}

int cmd_baseline(const Options& opts) {
    if (opts.records.empty() || opts.records.size() != opts.statics.size())
        throw std::runtime_error("baseline needs --records/--statics in matching pairs");
    std::vector<mrham::BaselineGroup> groups(opts.records.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        groups[g].records = mrham::read_records_json(opts.records[g]);
        groups[g].statics = mrham::read_static_csv(opts.statics[g]);
    }

    const auto result = mrham::fit_baseline(groups, {});
    mrham::write_json(out_path(opts, "baseline.json"), mrham::baseline_to_json(result.tf));
    mrham::write_json(out_path(opts, "baseline_report.json"),
                      mrham::fit_report_to_json(result.report));

    // Optional validation against a measured data set (typically the chirp):
    // the flat model drives the first group's static map through its TF.
    if (!opts.input.empty() || !opts.measured.empty()) {
        require(opts.input, "--input");
        require(opts.measured, "--measured");
        const auto input = mrham::read_time_series(opts.input);
        const auto measured = mrham::read_time_series(opts.measured);
        if (input.values.size() != measured.values.size() ||
            std::abs(input.sample_period - measured.sample_period) >
                1e-12 * std::max(input.sample_period, measured.sample_period))
            throw mrham::GridMismatchError("baseline: input and measurement grids differ");

        const auto& statics = groups.front().statics;
        const int degree = std::min<int>(3, static_cast<int>(statics.points.size()) - 1);
        const auto poly = mrham::fit_static(statics, degree);
        const double v0 = mrham::eval_nonlinearity(poly, input.values.front());
        std::vector<double> drive(input.values.size());
        for (std::size_t i = 0; i < drive.size(); ++i)
            drive[i] = mrham::eval_nonlinearity(poly, input.values[i]) - v0;

        double rate = 1.0;
        for (const auto& root : mrham::detail::cubic_roots(result.tf.a2, result.tf.a1,
                                                           result.tf.a0))
            rate = std::max(rate, std::abs(root));
        auto predicted = mrham::simulate_linear(result.tf, drive, input.sample_period,
                                                std::min(1e-3, 0.05 / rate), {0.0, 0.0, 0.0});
        for (double& v : predicted)
            v += measured.values.front();

        mrham::write_json(out_path(opts, "chirp_report.json"),
                          mrham::fit_report_to_json(mrham::fit_report(measured.values, predicted)));
        mrham::write_csv(out_path(opts, "chirp_overlay.csv"), {"t", "measured", "predicted"},
                         {time_column(measured.values.size(), measured.sample_period),
                          measured.values, predicted});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hammerstein model toolkit for a magnetorheological membrane actuator"};
    app.require_subcommand(1);

    Options opts;
    auto* gen = app.add_subcommand("generate", "synthesize excitation, response and records");
    auto gen_h = add_options(gen, opts);
    auto* ident = app.add_subcommand("identify", "run the staged identification");
    auto ident_h = add_options(ident, opts);
    auto* base = app.add_subcommand("baseline", "fit the flat third-order baseline");
    auto base_h = add_options(base, opts);
    auto* valid = app.add_subcommand("validate", "score a model against measured data");
    auto valid_h = add_options(valid, opts);
    auto* bode = app.add_subcommand("bode", "export the frequency response");
    auto bode_h = add_options(bode, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            merge_config(opts, gen_h, opts);
            return cmd_generate(opts);
        }
        if (ident->parsed()) {
            merge_config(opts, ident_h, opts);
            return cmd_identify(opts);
        }
        if (base->parsed()) {
            merge_config(opts, base_h, opts);
            return cmd_baseline(opts);
        }
        if (valid->parsed()) {
            merge_config(opts, valid_h, opts);
            return cmd_validate(opts);
        }
        if (bode->parsed()) {
            merge_config(opts, bode_h, opts);
            return cmd_bode(opts);
        }
    } catch (const mrham::FitError& e) {
        std::cerr << "identification error: " << e.what() << '\n';
        return 2;
    } catch (const mrham::GridMismatchError& e) {
        std::cerr << "grid error: " << e.what() << '\n';
        return 3;
    } catch (const mrham::StabilityError& e) {
        std::cerr << "stability error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
