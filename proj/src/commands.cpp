// commands.cpp — sweep execution, worker pool, deterministic CSV emission.

#include "jcdyn/commands.hpp"
#include "jcdyn/csv.hpp"
#include "jcdyn/liouville.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <stdexcept>
#include <thread>

namespace jcdyn {

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Run fn(i) for i in [0, n) on a worker pool. Per-row exceptions are captured
// as strings; an empty string means success. Row order of the output is fixed
// regardless of scheduling.
std::vector<std::string> run_rows(int n, int threads,
                                  const std::function<void(int)>& fn) {
    std::vector<std::string> errors(static_cast<std::size_t>(n));
    threads = std::min(resolve_threads(threads), std::max(n, 1));
    auto work_one = [&](int i) {
        try {
            fn(i);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        } catch (...) {
            errors[i] = "unknown error";
        }
    };
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) work_one(i);
        return errors;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                work_one(i);
        });
    for (std::thread& th : pool) th.join();
    return errors;
}

std::string hash_hex(const RunConfig& cfg) {
    char tmp[24];
    std::snprintf(tmp, sizeof(tmp), "0x%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    return tmp;
}

std::string format_T(double T) {
    char tmp[32];
    std::snprintf(tmp, sizeof(tmp), "%g", T);
    return tmp;
}

std::string quote(const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += "\"\"";
        else q += c;
    }
    q += "\"";
    return q;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir + ": " +
                                 ec.message());
}

void write_resolved_config(const RunConfig& cfg, const std::string& dir) {
    const std::string path = dir + "/resolved_config.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    const std::string body = cfg.to_json();
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

void standard_comments(CsvFile& csv, const RunConfig& cfg,
                       const std::string& command, const CommandOptions& opt) {
    csv.comment("command: " + command);
    csv.comment("config_hash: " + hash_hex(cfg));
    csv.comment("normalize: " + std::string(opt.normalize ? "1" : "0"));
    csv.comment("source: " + opt.source);
}

// failures.csv is emitted only when something failed
void write_failures(const std::string& dir, const RunConfig& cfg,
                    const CommandOptions& opt, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& rows) {
    CsvFile csv(dir + "/failures.csv");
    standard_comments(csv, cfg, command, opt);
    csv.header({"parameter", "error"});
    for (const auto& [param, err] : rows) csv.row({param, quote(err)});
    csv.close();
}

std::vector<int> clean_rungs(const std::vector<int>& rungs) {
    if (rungs.empty())
        throw std::invalid_argument("rung list must not be empty");
    std::vector<int> r = rungs;
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    if (r.front() < 1)
        throw std::invalid_argument("rung indices must be >= 1");
    return r;
}

double phonon_ratio(const RunConfig& cfg, double T) {
    return phonon_rate(T, cfg.thermal) / cfg.thermal.P_tilde;
}

SubspaceParams sector_params(const RunConfig& cfg, int n, double P_over_g,
                             double delta_over_g) {
    SubspaceParams p;
    p.n = n;
    p.g = 1.0;  // sector commands work in units of g
    p.kappa = cfg.blocks.kappa_over_g;
    p.gamma_x = cfg.blocks.gamma_x_over_g;
    p.P_theta = P_over_g;
    p.Delta = delta_over_g;
    return p;
}

}  // namespace

// ---- sweep helpers ----

std::vector<double> temperature_grid(const RunConfig& cfg) {
    std::vector<double> T(cfg.sweep.steps);
    for (int i = 0; i < cfg.sweep.steps; ++i)
        T[i] = cfg.sweep.T_min +
               (cfg.sweep.T_max - cfg.sweep.T_min) * i / (cfg.sweep.steps - 1);
    return T;
}

SystemParams system_at(const RunConfig& cfg, double T) {
    SystemParams p = cfg.system;
    p.omega_c = cavity_energy(T, cfg.thermal);
    p.omega_x = exciton_energy(T, cfg.thermal);
    p.P_theta = phonon_rate(T, cfg.thermal);
    return p;
}

Spectrum spectrum_at(const RunConfig& cfg, double T) {
    SystemParams p = system_at(cfg, T);
    HilbertSpace hs(cfg.numerics.n_max);
    Superoperator L = full_liouvillian(hs, p);
    Mat rho = steady_state(L);
    std::vector<double> grid =
        default_omega_grid(0.5 * (p.omega_c + p.omega_x),
                           cfg.numerics.omega_span_g * p.g,
                           cfg.numerics.omega_points);
    return emission_spectrum(L, rho, grid).s;
}

namespace {

// Internal sweep that keeps going past failures; errs[i] non-empty marks row i.
std::vector<SweepPoint> sweep_collect(const RunConfig& cfg, int threads,
                                      std::vector<std::string>& errs) {
    std::vector<double> T = temperature_grid(cfg);
    std::vector<SweepPoint> points(T.size());
    errs = run_rows(static_cast<int>(T.size()), threads, [&](int i) {
        SweepPoint pt;
        pt.T = T[i];
        pt.omega_c = cavity_energy(T[i], cfg.thermal);
        pt.omega_x = exciton_energy(T[i], cfg.thermal);
        pt.s = spectrum_at(cfg, T[i]);
        points[i] = std::move(pt);
    });
    return points;
}

void normalize_points(std::vector<SweepPoint>& points) {
    for (SweepPoint& pt : points) {
        if (pt.s.intensity.empty()) continue;
        double top = *std::max_element(pt.s.intensity.begin(), pt.s.intensity.end());
        if (top > 0.0) {
            for (double& v : pt.s.intensity) v /= top;
            pt.s.normalized = true;
        }
    }
}

}  // namespace

std::vector<SweepPoint> sweep_spectra(const RunConfig& cfg, int threads) {
    std::vector<std::string> errs;
    std::vector<SweepPoint> points = sweep_collect(cfg, threads, errs);
    for (std::size_t i = 0; i < errs.size(); ++i)
        if (!errs[i].empty())
            throw std::runtime_error("temperature T=" + format_T(points[i].T) +
                                     " K failed: " + errs[i]);
    return points;
}

// ---- cmd_spectra ----

int cmd_spectra(const RunConfig& cfg, const CommandOptions& opt) {
    ensure_out_dir(opt.out_dir);
    write_resolved_config(cfg, opt.out_dir);

    std::vector<std::string> errs;
    std::vector<SweepPoint> points = sweep_collect(cfg, opt.threads, errs);
    if (opt.normalize) normalize_points(points);

    // per-temperature file names: %g of T, de-collided deterministically
    std::map<std::string, int> used;
    CsvFile combined(opt.out_dir + "/spectra_combined.csv");
    standard_comments(combined, cfg, "spectra", opt);
    combined.header({"T_K", "omega_meV", "intensity"});

    std::vector<std::pair<std::string, std::string>> failures;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!errs[i].empty()) {
            failures.emplace_back("T=" + format_T(points[i].T), errs[i]);
            continue;
        }
        const SweepPoint& pt = points[i];
        std::string name = "spectrum_T" + format_T(pt.T);
        int& count = used[name];
        if (count++ > 0) name += "_" + std::to_string(count - 1);
        CsvFile one(opt.out_dir + "/" + name + ".csv");
        standard_comments(one, cfg, "spectra", opt);
        one.comment("T_K: " + CsvFile::num(pt.T));
        one.header({"omega_meV", "intensity"});
        for (std::size_t j = 0; j < pt.s.omega.size(); ++j) {
            one.row({CsvFile::num(pt.s.omega[j]), CsvFile::num(pt.s.intensity[j])});
            combined.row({CsvFile::num(pt.T), CsvFile::num(pt.s.omega[j]),
                          CsvFile::num(pt.s.intensity[j])});
        }
        one.close();
    }
    combined.close();

    if (!failures.empty()) {
        write_failures(opt.out_dir, cfg, opt, "spectra", failures);
        std::cerr << "error: spectrum solver failed at T=" << failures.front().first
                  << " (" << failures.front().second << ")\n";
        return 3;
    }
    return 0;
}

// ---- cmd_peaks ----

int cmd_peaks(const RunConfig& cfg, const CommandOptions& opt) {
    ensure_out_dir(opt.out_dir);
    write_resolved_config(cfg, opt.out_dir);

    std::vector<std::string> errs;
    std::vector<SweepPoint> points = sweep_collect(cfg, opt.threads, errs);
    std::vector<std::pair<std::string, std::string>> failures;
    for (std::size_t i = 0; i < errs.size(); ++i)
        if (!errs[i].empty())
            failures.emplace_back("T=" + format_T(points[i].T), errs[i]);
    if (!failures.empty()) {
        write_failures(opt.out_dir, cfg, opt, "peaks", failures);
        std::cerr << "error: spectrum solver failed at " << failures.front().first
                  << " (" << failures.front().second << ")\n";
        return 3;  // peak continuity needs the full sweep
    }
    if (opt.normalize) normalize_points(points);

    std::vector<TrackedPeak> rows =
        track_peaks(points, cfg.numerics.min_prominence);

    CsvFile csv(opt.out_dir + "/peaks.csv");
    standard_comments(csv, cfg, "peaks", opt);
    csv.header({"T_K", "label", "center_meV", "fwhm_meV", "height", "omega_c_meV",
                "omega_x_meV", "merged", "ambiguous"});
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const TrackedPeak& tp = rows[r];
        const SweepPoint& pt = points[r / 2];  // two rows (C, X) per sweep point
        csv.row({CsvFile::num(tp.T), tp.label, CsvFile::num(tp.center),
                 CsvFile::num(tp.fwhm), CsvFile::num(tp.height),
                 CsvFile::num(pt.omega_c), CsvFile::num(pt.omega_x),
                 CsvFile::flag(tp.merged), CsvFile::flag(tp.ambiguous)});
    }
    csv.close();
    return 0;
}

// ---- cmd_blocks ----

int cmd_blocks(const RunConfig& cfg, const CommandOptions& opt,
               const std::vector<int>& rungs) {
    ensure_out_dir(opt.out_dir);
    write_resolved_config(cfg, opt.out_dir);
    std::vector<int> nlist = clean_rungs(rungs);

    std::vector<MatrixSource> sources;
    if (opt.source == "oracle") sources = {MatrixSource::oracle};
    else if (opt.source == "printed") sources = {MatrixSource::printed};
    else if (opt.source == "both")
        sources = {MatrixSource::oracle, MatrixSource::printed};
    else
        throw std::invalid_argument("source must be oracle, printed, or both");

    const std::vector<double> T = temperature_grid(cfg);
    struct Job {
        double T;
        int n;
        MatrixSource src;
    };
    std::vector<Job> jobs;
    for (double t : T)
        for (int n : nlist)
            for (MatrixSource s : sources) jobs.push_back({t, n, s});

    std::vector<TransitionEigen> results(jobs.size());
    std::vector<std::string> errs =
        run_rows(static_cast<int>(jobs.size()), opt.threads, [&](int i) {
            const Job& jb = jobs[i];
            double p_over_g = cfg.blocks.P_tilde_over_g * phonon_ratio(cfg, jb.T);
            double delta_over_g =
                (exciton_energy(jb.T, cfg.thermal) -
                 cavity_energy(jb.T, cfg.thermal)) /
                cfg.system.g;
            results[i] =
                ngl_eigen(sector_params(cfg, jb.n, p_over_g, delta_over_g), jb.src);
        });

    CsvFile csv(opt.out_dir + "/blocks.csv");
    standard_comments(csv, cfg, "blocks", opt);
    csv.header({"T_K", "n", "label", "omega_meV", "Gamma_meV", "source", "region",
                "ambiguous"});

    // aggregate position of the (-,-) lines over rungs n >= 2 (the n=1 line is
    // excluded from the aggregate)
    struct Agg {
        double sum = 0.0, lo = 0.0, hi = 0.0;
        int count = 0;
    };
    std::map<double, Agg> singlet;
    std::map<double, std::string> region_at;

    std::vector<std::pair<std::string, std::string>> failures;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Job& jb = jobs[i];
        char param[64];
        std::snprintf(param, sizeof(param), "T=%s n=%d src=%s", format_T(jb.T).c_str(),
                      jb.n, jb.src == MatrixSource::oracle ? "oracle" : "printed");
        if (!errs[i].empty()) {
            failures.emplace_back(param, errs[i]);
            continue;
        }
        const TransitionEigen& e = results[i];
        const double wc = cavity_energy(jb.T, cfg.thermal);
        const std::string region =
            region_name(classify_region(phonon_rate(jb.T, cfg.thermal), cfg.thermal));
        region_at[jb.T] = region;
        for (std::size_t s = 0; s < e.labels.size(); ++s) {
            double omega_abs = wc + e.lambda[s].imag() * cfg.system.g;
            double gamma_mev = e.lambda[s].real() * cfg.system.g;
            csv.row({CsvFile::num(jb.T), CsvFile::integer(jb.n),
                     label_name(e.labels[s]), CsvFile::num(omega_abs),
                     CsvFile::num(gamma_mev),
                     jb.src == MatrixSource::oracle ? "oracle" : "printed", region,
                     CsvFile::flag(e.ambiguous)});
            if (jb.src == MatrixSource::oracle && jb.n >= 2 &&
                e.labels[s] == BranchLabel{-1, -1}) {
                Agg& a = singlet[jb.T];
                if (a.count == 0) {
                    a.lo = a.hi = omega_abs;
                } else {
                    a.lo = std::min(a.lo, omega_abs);
                    a.hi = std::max(a.hi, omega_abs);
                }
                a.sum += omega_abs;
                a.count += 1;
            }
        }
    }
    csv.close();

    CsvFile sg(opt.out_dir + "/singlet_positions.csv");
    standard_comments(sg, cfg, "blocks", opt);
    sg.comment("aggregate of the (-,-) line positions over rungs n >= 2");
    sg.header({"T_K", "mean_omega_meV", "min_omega_meV", "max_omega_meV", "count",
               "region"});
    for (const auto& [t, a] : singlet)
        sg.row({CsvFile::num(t), CsvFile::num(a.sum / a.count), CsvFile::num(a.lo),
                CsvFile::num(a.hi), CsvFile::integer(a.count), region_at[t]});
    sg.close();

    CsvFile rb(opt.out_dir + "/region_boundaries.csv");
    standard_comments(rb, cfg, "blocks", opt);
    rb.header({"boundary", "T_K"});
    rb.row({"I_II", CsvFile::num(region_boundary_temperature(0.1, cfg.thermal))});
    rb.row({"II_III", CsvFile::num(region_boundary_temperature(0.8, cfg.thermal))});
    rb.close();

    if (!failures.empty()) {
        write_failures(opt.out_dir, cfg, opt, "blocks", failures);
        std::cerr << "error: " << failures.size() << " sector row(s) failed\n";
        return failures.size() == jobs.size() ? 3 : 4;
    }
    return 0;
}

// ---- cmd_ep_map ----

int cmd_ep_map(const RunConfig& cfg, const CommandOptions& opt,
               const std::vector<int>& rungs,
               const std::vector<double>& delta_over_g) {
    ensure_out_dir(opt.out_dir);
    write_resolved_config(cfg, opt.out_dir);
    std::vector<int> nlist = clean_rungs(rungs);
    if (delta_over_g.empty())
        throw std::invalid_argument("detuning grid must not be empty");

    struct Job {
        int n;
        double delta;
    };
    std::vector<Job> jobs;
    for (int n : nlist)
        for (double d : delta_over_g) jobs.push_back({n, d});

    // the search ceiling comfortably covers the n = 1 coalescence near 4g + kappa
    const double P_hi = 1.5 * (4.0 + cfg.blocks.kappa_over_g);
    std::vector<ExceptionalPoint> eps(jobs.size());
    std::vector<std::string> errs =
        run_rows(static_cast<int>(jobs.size()), opt.threads, [&](int i) {
            SubspaceParams base = sector_params(cfg, jobs[i].n, 0.0, jobs[i].delta);
            eps[i] = exceptional_point(base, 0.0, P_hi);
        });

    CsvFile csv(opt.out_dir + "/ep_map.csv");
    standard_comments(csv, cfg, "ep_map", opt);
    csv.comment("is_ep=0 rows are avoided crossings (gap minimum above tolerance)");
    csv.header({"n", "Delta_over_g", "P_crit_over_g", "omega_at_ep_meV",
                "residual_gap", "is_ep"});
    std::vector<std::pair<std::string, std::string>> failures;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        char param[64];
        std::snprintf(param, sizeof(param), "n=%d Delta_over_g=%s", jobs[i].n,
                      format_T(jobs[i].delta).c_str());
        if (!errs[i].empty()) {
            failures.emplace_back(param, errs[i]);
            continue;
        }
        const ExceptionalPoint& ep = eps[i];
        csv.row({CsvFile::integer(jobs[i].n), CsvFile::num(jobs[i].delta),
                 CsvFile::num(ep.P_crit), CsvFile::num(ep.omega_at_ep * cfg.system.g),
                 CsvFile::num(ep.residual_gap), CsvFile::flag(ep.is_ep)});
    }
    csv.close();

    if (!failures.empty()) {
        write_failures(opt.out_dir, cfg, opt, "ep_map", failures);
        std::cerr << "error: " << failures.size() << " map row(s) failed\n";
        return failures.size() == jobs.size() ? 3 : 4;
    }
    return 0;
}

// ---- cmd_coefficients ----

int cmd_coefficients(const RunConfig& cfg, const CommandOptions& opt,
                     const std::vector<int>& rungs,
                     const std::vector<double>& p_over_g) {
    ensure_out_dir(opt.out_dir);
    write_resolved_config(cfg, opt.out_dir);
    std::vector<int> nlist = clean_rungs(rungs);
    if (p_over_g.empty())
        throw std::invalid_argument("P_theta grid must not be empty");

    std::vector<std::vector<BareCoefficients>> per_rung(nlist.size());
    std::vector<std::string> errs =
        run_rows(static_cast<int>(nlist.size()), opt.threads, [&](int i) {
            SubspaceParams p =
                sector_params(cfg, nlist[i], 0.0, cfg.blocks.coeff_delta_over_g);
            std::vector<TransitionEigen> track =
                track_branches(p, p_over_g, MatrixSource::oracle);
            per_rung[i].reserve(track.size());
            for (const TransitionEigen& e : track)
                per_rung[i].push_back(bare_coefficients(e));
        });

    CsvFile csv(opt.out_dir + "/coefficients.csv");
    standard_comments(csv, cfg, "coefficients", opt);
    csv.comment("(-,-) branch at Delta_over_g = " +
                CsvFile::num(cfg.blocks.coeff_delta_over_g));
    csv.header({"P_theta_over_g", "n", "C00_sq", "C11_sq"});
    std::vector<std::pair<std::string, std::string>> failures;
    for (std::size_t i = 0; i < nlist.size(); ++i) {
        if (!errs[i].empty()) {
            failures.emplace_back("n=" + std::to_string(nlist[i]), errs[i]);
            continue;
        }
        for (std::size_t j = 0; j < p_over_g.size(); ++j) {
            const BareCoefficients& bc = per_rung[i][j];
            csv.row({CsvFile::num(p_over_g[j]), CsvFile::integer(nlist[i]),
                     CsvFile::num(bc.c_sq(0, 0)), CsvFile::num(bc.c_sq(1, 1))});
        }
    }
    csv.close();

    if (!failures.empty()) {
        write_failures(opt.out_dir, cfg, opt, "coefficients", failures);
        std::cerr << "error: " << failures.size() << " rung(s) failed\n";
        return failures.size() == nlist.size() ? 3 : 4;
    }
    return 0;
}

}  // namespace jcdyn
