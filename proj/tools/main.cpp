// Command-line front end. Talks to the library exclusively through the C
// interface; everything else here is config plumbing and file output.
//
// Exit codes: 0 ok, 2 bad config/arguments, 3 runtime failure, 4 partial batch.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cavsim/cavsim.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCnm = 2.99792458e17;

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct run_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// public-API errors on inputs are config problems; the rest are runtime
void ck(cavsim_status st, const std::string &what) {
    if (st == CAVSIM_OK) return;
    std::string msg = what + ": " + cavsim_last_error();
    if (st == CAVSIM_ERR_INVALID_ARGUMENT || st == CAVSIM_ERR_DOMAIN)
        throw config_error(msg);
    throw run_error(msg);
}

using stack_ptr = std::unique_ptr<cavsim_stack, decltype(&cavsim_stack_destroy)>;
using emitter_ptr = std::unique_ptr<cavsim_emitter, decltype(&cavsim_emitter_destroy)>;

struct ctx {
    json cfg;
    std::string hash_hex;
    fs::path out_dir;
    unsigned long long seed = 1;
    bool verbose = false;
};

void vlog(const ctx &c, const std::string &msg) {
    if (c.verbose) std::fprintf(stderr, "[cavsim] %s\n", msg.c_str());
}

void load_config(const std::string &path, ctx &c) {
    if (path.empty()) throw config_error("--config is required");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read config file " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the raw bytes
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    c.hash_hex = buf;
    try {
        c.cfg = json::parse(bytes, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error &e) {
        throw config_error(std::string("config parse: ") + e.what());
    }
}

// Output file with the config hash stamped first; written to a temp name and
// renamed into place on close so readers never see a half-written file.
class out_file {
  public:
    out_file(const ctx &c, const std::string &name)
        : final_(c.out_dir / name), tmp_(final_.string() + ".tmp") {
        std::error_code ec;
        fs::create_directories(c.out_dir, ec);
        f_ = std::fopen(tmp_.string().c_str(), "w");
        if (!f_) throw run_error("cannot open " + tmp_.string());
        std::fprintf(f_, "# config_hash=%s\n", c.hash_hex.c_str());
    }
    out_file(const out_file &) = delete;
    std::FILE *get() { return f_; }
    void close() {
        if (!f_) return;
        bool bad = std::fclose(f_) != 0;
        f_ = nullptr;
        if (bad) throw run_error("write failed: " + tmp_.string());
        std::error_code ec;
        fs::rename(tmp_, final_, ec);
        if (ec) throw run_error("cannot finalize " + final_.string());
    }
    ~out_file() {
        if (f_) {
            std::fclose(f_);
            std::remove(tmp_.string().c_str());
        }
    }

  private:
    fs::path final_, tmp_;
    std::FILE *f_ = nullptr;
};

const json &need(const json &j, const char *key) {
    if (!j.is_object() || !j.contains(key))
        throw config_error(std::string("missing required field \"") + key + "\"");
    return j.at(key);
}

double need_num(const json &j, const char *key) {
    const json &v = need(j, key);
    if (!v.is_number())
        throw config_error(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

double opt_num(const json &j, const char *key, double dflt) {
    return j.is_object() && j.contains(key) ? need_num(j, key) : dflt;
}

bool opt_bool(const json &j, const char *key, bool dflt) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    const json &v = j.at(key);
    if (!v.is_boolean())
        throw config_error(std::string("field \"") + key + "\" must be a boolean");
    return v.get<bool>();
}

std::string opt_str(const json &j, const char *key, const std::string &dflt) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    const json &v = j.at(key);
    if (!v.is_string())
        throw config_error(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
}

size_t need_count(const json &j, const char *key) {
    double v = need_num(j, key);
    if (v < 2 || v != std::floor(v))
        throw config_error(std::string("field \"") + key +
                           "\" must be an integer >= 2");
    return (size_t)v;
}

cavsim_budget budget_from(const json &j) {
    const json &b = need(j, "budget_ppm");
    cavsim_budget out{need_num(b, "t1") * 1e-6, need_num(b, "l1") * 1e-6,
                      need_num(b, "t2") * 1e-6, need_num(b, "l2") * 1e-6};
    return out;
}

// either an explicit layer list or a quarter-wave prescription
stack_ptr stack_from(const json &m) {
    cavsim_stack *raw = nullptr;
    if (m.contains("layers")) {
        const json &ls = m.at("layers");
        if (!ls.is_array() || ls.empty())
            throw config_error("\"layers\" must be a non-empty array");
        ck(cavsim_stack_create(opt_num(m, "ambient_index", 1.0),
                               need_num(m, "substrate_index"), &raw),
           "stack");
        stack_ptr s(raw, &cavsim_stack_destroy);
        for (const json &L : ls)
            ck(cavsim_stack_add_layer(s.get(), need_num(L, "n"),
                                      need_num(L, "thickness_nm")),
               "layer");
        return s;
    }
    ck(cavsim_stack_quarter_wave(
           need_num(m, "center_wavelength_nm"), need_num(m, "n_high"),
           need_num(m, "n_low"), (int)need_num(m, "pairs"),
           need_num(m, "substrate_index"),
           opt_bool(m, "terminate_low_quarter", false) ? 1 : 0, &raw),
       "mirror");
    return stack_ptr(raw, &cavsim_stack_destroy);
}

std::vector<double> linspace(double a, double b, size_t n) {
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i)
        x[i] = a + (b - a) * double(i) / double(n - 1);
    return x;
}

std::vector<double> geomspace(double a, double b, size_t n) {
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i)
        x[i] = a * std::pow(b / a, double(i) / double(n - 1));
    return x;
}

double lerp_grid(const std::vector<double> &x, const std::vector<double> &y,
                 double x0) {
    size_t i = 1;
    while (i + 1 < x.size() && x[i] < x0) ++i;
    double t = (x0 - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

double omega_of(double lambda_nm) { return 2.0 * kPi * kCnm / lambda_nm; }

/* ---------------- tmm ---------------- */

int run_tmm(ctx &c) {
    stack_ptr s = stack_from(c.cfg);
    const json &g = need(c.cfg, "grid");
    double lo = need_num(g, "min_nm"), hi = need_num(g, "max_nm");
    size_t nsamp = need_count(g, "samples");
    std::vector<double> wl(nsamp), tr(nsamp);
    ck(cavsim_stack_transmission_spectrum(s.get(), lo, hi, nsamp, wl.data(),
                                          tr.data()),
       "transmission spectrum");
    vlog(c, "stack with " + std::to_string(cavsim_stack_layer_count(s.get())) +
                " layers, " + std::to_string(nsamp) + " samples");

    out_file f(c, "tmm_spectrum.csv");
    std::fprintf(f.get(), "wavelength_nm,transmittance\n");
    for (size_t i = 0; i < nsamp; ++i)
        std::fprintf(f.get(), "%.10g,%.10g\n", wl[i], tr[i]);
    f.close();

    if (c.cfg.contains("probes_nm")) {
        const json &ps = c.cfg.at("probes_nm");
        if (!ps.is_array())
            throw config_error("\"probes_nm\" must be an array of wavelengths");
        out_file p(c, "tmm_probes.csv");
        std::fprintf(p.get(),
                     "wavelength_nm,reflectance,transmittance,penetration_um,"
                     "in_stop_band\n");
        for (const json &pj : ps) {
            double lam = pj.get<double>();
            cavsim_stack_response r;
            double depth = 0;
            int band = 0;
            ck(cavsim_stack_response_at(s.get(), lam, &r), "probe");
            ck(cavsim_stack_penetration_depth(s.get(), lam, &depth, &band),
               "penetration");
            std::fprintf(p.get(), "%.10g,%.10g,%.10g,%.10g,%d\n", lam,
                         r.reflectance, r.transmittance, depth, band);
        }
        p.close();
    }
    if (c.cfg.contains("field_at")) {
        const json &fa = c.cfg.at("field_at");
        double lam = need_num(fa, "wavelength_nm");
        double h = need_num(fa, "height_nm");
        double eta = 0;
        ck(cavsim_stack_field_factor(s.get(), lam, h, &eta), "field factor");
        out_file r(c, "tmm_field.txt");
        std::fprintf(r.get(), "wavelength_nm=%.10g\nheight_nm=%.10g\neta_e=%.10g\n",
                     lam, h, eta);
        r.close();
    }
    return 0;
}

/* ---------------- cavity ---------------- */

int run_cavity(ctx &c) {
    double lam = need_num(c.cfg, "wavelength_nm");
    double d_eff;
    if (c.cfg.contains("resonances_nm")) {
        const json &rs = c.cfg.at("resonances_nm");
        if (!rs.is_array() || rs.size() != 2)
            throw config_error("\"resonances_nm\" must be [lambda1, lambda2]");
        ck(cavsim_effective_length_um(rs[0].get<double>(), rs[1].get<double>(),
                                      &d_eff),
           "effective length");
    } else {
        d_eff = need_num(c.cfg, "d_eff_um");
    }
    double roc;
    if (c.cfg.contains("transverse_splitting_nm")) {
        ck(cavsim_roc_from_splitting_um(need_num(c.cfg, "transverse_splitting_nm"),
                                        lam, d_eff, &roc),
           "radius of curvature");
    } else {
        roc = need_num(c.cfg, "roc_um");
    }
    cavsim_geometry g{d_eff, roc, lam};
    cavsim_budget b = budget_from(c.cfg);
    double spacing = 0, w0 = 0, v = 0, fin = 0, dl = 0, q = 0, kap = 0, eta = 0;
    ck(cavsim_transverse_mode_spacing_nm(&g, &spacing), "mode spacing");
    ck(cavsim_mode_waist_um(&g, &w0), "waist");
    ck(cavsim_mode_volume_um3(&g, &v), "mode volume");
    ck(cavsim_finesse(&b, &fin), "finesse");
    ck(cavsim_linewidth_nm(lam, d_eff, &b, &dl), "linewidth");
    ck(cavsim_quality_factor(lam, dl, &q), "quality factor");
    ck(cavsim_decay_rate(d_eff, &b, &kap), "decay rate");
    ck(cavsim_outcoupling(&b, &eta), "outcoupling");

    out_file r(c, "cavity_report.txt");
    std::fprintf(r.get(),
                 "wavelength_nm=%.10g\n"
                 "d_eff_um=%.10g\n"
                 "roc_um=%.10g\n"
                 "mode_spacing_nm=%.10g\n"
                 "waist_um=%.10g\n"
                 "mode_volume_um3=%.10g\n"
                 "finesse=%.10g\n"
                 "linewidth_nm=%.10g\n"
                 "quality_factor=%.10g\n"
                 "kappa_rad_s=%.10g\n"
                 "outcoupling=%.10g\n",
                 lam, d_eff, roc, spacing, w0, v, fin, dl, q, kap, eta);
    r.close();
    return 0;
}

/* ---------------- purcell-sweep ---------------- */

void write_sweep_svg(const ctx &c, const std::vector<double> &v,
                     const std::vector<double> &ce,
                     const std::vector<double> &cr) {
    const double W = 640, H = 480, ML = 70, MR = 20, MT = 20, MB = 50;
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) continue;
        xlo = std::min(xlo, std::log10(v[i]));
        xhi = std::max(xhi, std::log10(v[i]));
        for (double y : {ce[i], cr[i]}) {
            ylo = std::min(ylo, std::log10(y));
            yhi = std::max(yhi, std::log10(y));
        }
    }
    auto px = [&](double x) {
        return ML + (std::log10(x) - xlo) / (xhi - xlo) * (W - ML - MR);
    };
    auto py = [&](double y) {
        return H - MB - (std::log10(y) - ylo) / (yhi - ylo) * (H - MT - MB);
    };
    out_file f(c, "volume_sweep.svg");
    std::fprintf(f.get(),
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" "
                 "height=\"%g\" viewBox=\"0 0 %g %g\">\n",
                 W, H, W, H);
    std::fprintf(f.get(),
                 "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" "
                 "fill=\"white\" stroke=\"black\"/>\n",
                 ML, MT, W - ML - MR, H - MT - MB);
    for (int series = 0; series < 2; ++series) {
        const std::vector<double> &y = series == 0 ? ce : cr;
        std::string pts;
        for (size_t i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i])) continue;
            char b[64];
            std::snprintf(b, sizeof b, "%.2f,%.2f ", px(v[i]), py(y[i]));
            pts += b;
        }
        std::fprintf(f.get(),
                     "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"2\" "
                     "points=\"%s\"/>\n",
                     series == 0 ? "#1f6fb2" : "#b23a1f", pts.c_str());
    }
    std::fprintf(f.get(),
                 "<text x=\"%g\" y=\"%g\" font-size=\"14\">mode volume "
                 "(um^3, log)</text>\n",
                 W / 2 - 70, H - 12);
    std::fprintf(f.get(),
                 "<text x=\"14\" y=\"%g\" font-size=\"14\" transform=\"rotate(-90 "
                 "14 %g)\">enhancement (log)</text>\n",
                 H / 2 + 60, H / 2 + 60);
    std::fprintf(f.get(),
                 "<text x=\"%g\" y=\"%g\" font-size=\"13\" "
                 "fill=\"#1f6fb2\">broadband</text>\n",
                 W - 140.0, MT + 20);
    std::fprintf(f.get(),
                 "<text x=\"%g\" y=\"%g\" font-size=\"13\" "
                 "fill=\"#b23a1f\">rate model</text>\n",
                 W - 140.0, MT + 38);
    std::fprintf(f.get(), "</svg>\n");
    f.close();
}

// least-squares slope of log y vs log x over finite points
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) throw run_error("not enough finite sweep points for a slope");
    return (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
}

int run_sweep(ctx &c) {
    std::string mode = opt_str(c.cfg, "mode", "volume");
    double lam = need_num(c.cfg, "wavelength_nm");
    double roc = need_num(c.cfg, "roc_um");

    if (mode == "volume") {
        cavsim_budget b = budget_from(c.cfg);
        const json &dg = need(c.cfg, "d_eff_um");
        size_t n = need_count(dg, "count");
        std::vector<double> d =
            linspace(need_num(dg, "min"), need_num(dg, "max"), n);
        cavsim_emitter *raw = nullptr;
        ck(cavsim_emitter_nv_default(&raw), "emitter");
        emitter_ptr e(raw, &cavsim_emitter_destroy);
        std::vector<double> v(n), ce(n), cr(n);
        size_t n_ok = 0;
        ck(cavsim_sweep_mode_volume(
               e.get(), roc, lam, &b, need_num(c.cfg, "eta_e"),
               need_num(c.cfg, "eta_theta"), need_num(c.cfg, "eta_lambda"),
               need_num(c.cfg, "q_em"), d.data(), n, v.data(), ce.data(),
               cr.data(), &n_ok),
           "volume sweep");
        vlog(c, std::to_string(n_ok) + "/" + std::to_string(n) +
                    " stable geometries");

        out_file f(c, "volume_sweep.csv");
        std::fprintf(f.get(), "d_eff_um,V_um3,C_effective,C_rate_model\n");
        for (size_t i = 0; i < n; ++i)
            std::fprintf(f.get(), "%.10g,%.10g,%.10g,%.10g\n", d[i], v[i], ce[i],
                         cr[i]);
        f.close();

        double s1 = loglog_slope(v, ce), s2 = loglog_slope(v, cr);
        out_file r(c, "sweep_summary.txt");
        std::fprintf(r.get(),
                     "mode=volume\npoints=%zu\nstable=%zu\n"
                     "slope_c_effective=%.6f\nslope_c_rate=%.6f\n",
                     n, n_ok, s1, s2);
        r.close();
        if (opt_bool(c.cfg, "svg", false)) write_sweep_svg(c, v, ce, cr);
        return 0;
    }

    if (mode == "quality") {
        cavsim_geometry g{need_num(c.cfg, "d_eff_um"), roc, lam};
        double v = 0;
        ck(cavsim_mode_volume_um3(&g, &v), "mode volume");
        double ff = need_num(c.cfg, "field_factor");
        double cap = opt_num(c.cfg, "q_cap", 3.5e5);
        size_t n = need_count(c.cfg, "count");
        std::vector<double> qs =
            geomspace(need_num(c.cfg, "q_min"), need_num(c.cfg, "q_max"), n);
        out_file f(c, "quality_sweep.csv");
        std::fprintf(f.get(), "lambda0_nm,Q,C0\n");
        double best_c0 = 0, best_q = 0;
        for (double q : qs) {
            double qe = std::min(q, cap);  // mirror budget bounds the linewidth
            double c0 = 0;
            ck(cavsim_ideal_purcell(lam, qe, v, ff, &c0), "enhancement");
            std::fprintf(f.get(), "%.10g,%.10g,%.10g\n", lam, qe, c0);
            if (c0 > best_c0) {
                best_c0 = c0;
                best_q = qe;
            }
        }
        f.close();
        out_file r(c, "sweep_summary.txt");
        std::fprintf(r.get(),
                     "mode=quality\nmode_volume_um3=%.10g\nmax_C0=%.10g\n"
                     "at_Q=%.10g\n",
                     v, best_c0, best_q);
        r.close();
        return 0;
    }
    throw config_error("\"mode\" must be \"volume\" or \"quality\"");
}

/* ---------------- analyze ---------------- */

struct truth_setup {
    emitter_ptr e{nullptr, &cavsim_emitter_destroy};
    double l0 = 0, fwhm = 0, q = 0, kap = 0, v = 0, eta_c = 0, g0 = 0;
    double r_mode = 0, c_true = 0, c0_true = 0;
    double eta_omega = 0, eps_d = 0, n_exc = 0, k0 = 0;
    double win_lo = 0, win_hi = 0;
    std::vector<double> grid_fs, grid_c, phi, t2, lor;
};

truth_setup build_truth(const json &cfg) {
    truth_setup T;
    T.l0 = need_num(cfg, "wavelength_nm");
    double d = need_num(cfg, "d_eff_um");
    double roc = need_num(cfg, "roc_um");
    cavsim_budget b = budget_from(cfg);
    T.eta_omega = need_num(cfg, "eta_omega");
    double eta_e = need_num(cfg, "eta_e");
    double eta_theta = need_num(cfg, "eta_theta");

    cavsim_emitter *raw = nullptr;
    ck(cavsim_emitter_nv_default(&raw), "emitter");
    T.e.reset(raw);
    ck(cavsim_linewidth_nm(T.l0, d, &b, &T.fwhm), "linewidth");
    ck(cavsim_quality_factor(T.l0, T.fwhm, &T.q), "quality factor");
    ck(cavsim_decay_rate(d, &b, &T.kap), "decay rate");
    ck(cavsim_outcoupling(&b, &T.eta_c), "outcoupling");
    ck(cavsim_emitter_gamma0(T.e.get(), &T.g0), "emitter");
    cavsim_geometry g{d, roc, T.l0};
    ck(cavsim_mode_volume_um3(&g, &T.v), "mode volume");
    ck(cavsim_emission_rate(T.e.get(), T.v, eta_e, eta_theta, omega_of(T.l0),
                            nullptr, T.kap, &T.r_mode),
       "emission rate");
    T.c_true = T.r_mode / T.g0;
    double ff = need_num(cfg, "field_factor");
    ck(cavsim_ideal_purcell(T.l0, T.q, T.v, ff, &T.c0_true), "enhancement");

    const json &gf = need(cfg, "grid_fs");
    T.grid_fs = linspace(need_num(gf, "min_nm"), need_num(gf, "max_nm"),
                         need_count(gf, "samples"));
    double half = 0.5, nc = 5001;
    if (cfg.contains("grid_cavity")) {
        const json &gc = cfg.at("grid_cavity");
        half = opt_num(gc, "halfwidth_nm", 0.5);
        nc = double(need_count(gc, "samples"));
    }
    T.grid_c = linspace(T.l0 - half, T.l0 + half, (size_t)nc);

    const json &w = need(cfg, "window");
    T.win_lo = need_num(w, "lo_nm");
    T.win_hi = need_num(w, "hi_nm");

    const json &ex = cfg.contains("excitation") ? cfg.at("excitation") : json::object();
    T.eps_d = opt_num(ex, "detected_fraction", 0.3);
    T.n_exc = opt_num(ex, "pulses_per_s", 1e6);
    T.k0 = opt_num(ex, "free_space_scale", 2.0);

    // emission shape, normalized to unit area over the whole band
    T.phi.resize(T.grid_fs.size());
    ck(cavsim_emitter_spectrum(T.e.get(), T.grid_fs.data(), T.grid_fs.size(),
                               T.phi.data()),
       "spectrum");
    {
        std::vector<double> wide = linspace(260.0, 4000.0, 150001);
        std::vector<double> sw(wide.size());
        ck(cavsim_emitter_spectrum(T.e.get(), wide.data(), wide.size(), sw.data()),
           "spectrum");
        double area = 0;
        ck(cavsim_integrate_band(wide.data(), sw.data(), wide.size(), 260.0,
                                 4000.0, &area),
           "normalization");
        for (double &p : T.phi) p /= area;
    }

    stack_ptr mirror = stack_from(need(cfg, "mirror"));
    T.t2.resize(T.grid_fs.size());
    for (size_t i = 0; i < T.grid_fs.size(); ++i) {
        cavsim_stack_response resp;
        ck(cavsim_stack_response_at(mirror.get(), T.grid_fs[i], &resp),
           "mirror response");
        T.t2[i] = resp.transmittance;
    }
    T.lor.resize(T.grid_c.size());
    for (size_t i = 0; i < T.grid_c.size(); ++i)
        T.lor[i] = (T.fwhm / (2 * kPi)) /
                   ((T.grid_c[i] - T.l0) * (T.grid_c[i] - T.l0) +
                    T.fwhm * T.fwhm / 4);
    return T;
}

struct item_result {
    std::string label;
    double pc = 0, pfs = 0, c_exp = 0, c0_exp = 0, c_err = 0, c0_err = 0;
};

item_result analyze_item(const truth_setup &T, const std::string &label,
                         double noise, std::mt19937_64 &rng,
                         std::vector<double> *keep_fs,
                         std::vector<double> *keep_cav) {
    if (noise < 0 || noise >= 1)
        throw config_error("item \"" + label + "\": noise must be in [0, 1)");
    std::normal_distribution<double> n01(0.0, 1.0);
    auto jitter = [&](double x) {
        return noise > 0 ? x * (1.0 + noise * n01(rng)) : x;
    };

    size_t n = T.grid_fs.size();
    std::vector<double> s0(n), sm(n);
    for (size_t i = 0; i < n; ++i) {
        s0[i] = jitter(T.k0 * T.phi[i]);
        sm[i] = jitter(T.eps_d * T.eta_omega * T.n_exc * T.g0 * T.t2[i] * T.phi[i]);
    }
    std::vector<double> sc(T.grid_c.size());
    for (size_t i = 0; i < T.grid_c.size(); ++i)
        sc[i] = jitter(T.eps_d * T.eta_c * T.n_exc * T.r_mode * T.lor[i]);

    double b = 0;
    ck(cavsim_fit_scale_factor(T.grid_fs.data(), sm.data(), T.t2.data(),
                               s0.data(), n, T.win_lo, T.win_hi, &b, nullptr),
       "scale factor");
    std::vector<double> sfs(n);
    for (size_t i = 0; i < n; ++i) sfs[i] = b * s0[i];
    double p_fs = 0;
    ck(cavsim_integrate_band(T.grid_fs.data(), sfs.data(), n, T.grid_fs.front(),
                             T.grid_fs.back(), &p_fs),
       "band power");
    cavsim_resonance res;
    ck(cavsim_integrate_resonance(T.grid_c.data(), sc.data(), T.grid_c.size(),
                                  T.l0, T.fwhm, 3.0, &res),
       "resonance");

    item_result r;
    r.label = label;
    r.pc = res.power_corrected;
    r.pfs = p_fs;
    ck(cavsim_experimental_purcell(res.power_corrected, p_fs, T.eta_omega,
                                   T.eta_c, &r.c_exp),
       "enhancement ratio");
    double smax = 0;
    ck(cavsim_peak_spectral_density(res.power_corrected, T.fwhm, &smax),
       "peak density");
    double sfs_l0 = lerp_grid(T.grid_fs, sfs, T.l0);
    ck(cavsim_experimental_ideal_purcell(smax, sfs_l0, T.eta_omega, T.eta_c,
                                         &r.c0_exp),
       "peak ratio");
    r.c_err = r.c_exp / T.c_true - 1.0;
    r.c0_err = r.c0_exp / T.c0_true - 1.0;
    if (keep_fs) *keep_fs = std::move(sfs);
    if (keep_cav) *keep_cav = std::move(sc);
    return r;
}

int run_analyze(ctx &c) {
    truth_setup T = build_truth(c.cfg);
    vlog(c, "truth: C=" + std::to_string(T.c_true) +
                " C0=" + std::to_string(T.c0_true));

    struct item_spec {
        std::string label;
        double noise;
        unsigned long long offset;
    };
    std::vector<json> raw_items;
    bool batch = c.cfg.contains("batch");
    if (batch) {
        const json &bl = c.cfg.at("batch");
        if (!bl.is_array() || bl.empty())
            throw config_error("\"batch\" must be a non-empty array");
        for (const json &it : bl) raw_items.push_back(it);
    } else {
        raw_items.push_back(c.cfg);
    }

    std::vector<item_result> ok_items;
    std::vector<double> demo_fs, demo_cav;
    size_t failed = 0;
    bool any_runtime_failure = false;
    for (size_t i = 0; i < raw_items.size(); ++i) {
        const json &it = raw_items[i];
        std::string label = opt_str(it, "label", batch ? "" : "run");
        try {
            if (label.empty())
                throw config_error("batch item " + std::to_string(i) +
                                   ": missing required field \"label\"");
            double noise = opt_num(it, "noise", opt_num(c.cfg, "noise", 0.0));
            unsigned long long offset =
                (unsigned long long)opt_num(it, "seed_offset", double(i));
            std::mt19937_64 rng(c.seed + 7919ull * offset);
            ok_items.push_back(analyze_item(T, label, noise, rng,
                                            batch ? nullptr : &demo_fs,
                                            batch ? nullptr : &demo_cav));
            vlog(c, "item \"" + label + "\" done");
        } catch (const config_error &e) {
            ++failed;
            std::fprintf(stderr, "error: %s\n", e.what());
        } catch (const run_error &e) {
            ++failed;
            any_runtime_failure = true;
            std::fprintf(stderr, "error: %s\n", e.what());
        }
    }
    if (ok_items.empty())
        return any_runtime_failure ? 3 : 2;  // nothing recoverable

    out_file f(c, "analyze_summary.csv");
    std::fprintf(f.get(), "label,lambda0_nm,fwhm_nm,Pc,Pfs,C,C0\n");
    for (const item_result &r : ok_items)
        std::fprintf(f.get(), "%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                     r.label.c_str(), T.l0, T.fwhm, r.pc, r.pfs, r.c_exp,
                     r.c0_exp);
    f.close();

    out_file r(c, "analyze_report.txt");
    std::fprintf(r.get(),
                 "lambda0_nm=%.10g\nfwhm_nm=%.10g\nquality_factor=%.10g\n"
                 "mode_volume_um3=%.10g\noutcoupling=%.10g\n"
                 "C_true=%.10g\nC0_true=%.10g\n",
                 T.l0, T.fwhm, T.q, T.v, T.eta_c, T.c_true, T.c0_true);
    for (const item_result &ir : ok_items)
        std::fprintf(r.get(),
                     "%s.C_exp=%.10g\n%s.C_rel_err=%.6f\n"
                     "%s.C0_exp=%.10g\n%s.C0_rel_err=%.6f\n",
                     ir.label.c_str(), ir.c_exp, ir.label.c_str(), ir.c_err,
                     ir.label.c_str(), ir.c0_exp, ir.label.c_str(), ir.c0_err);
    r.close();

    if (!batch && !demo_fs.empty()) {
        out_file a(c, "free_space_spectrum.csv");
        std::fprintf(a.get(), "wavelength_nm,counts_per_s\n");
        for (size_t i = 0; i < T.grid_fs.size(); ++i)
            std::fprintf(a.get(), "%.10g,%.10g\n", T.grid_fs[i], demo_fs[i]);
        a.close();
        out_file b(c, "cavity_spectrum.csv");
        std::fprintf(b.get(), "wavelength_nm,counts_per_s\n");
        for (size_t i = 0; i < T.grid_c.size(); ++i)
            std::fprintf(b.get(), "%.10g,%.10g\n", T.grid_c[i], demo_cav[i]);
        b.close();
    }
    return failed > 0 ? 4 : 0;
}

/* ---------------- fit-spectrum ---------------- */

int run_fit_spectrum(ctx &c) {
    const json &g = need(c.cfg, "grid");
    std::vector<double> wl = linspace(need_num(g, "min_nm"),
                                      need_num(g, "max_nm"),
                                      need_count(g, "samples"));
    double noise = opt_num(c.cfg, "noise", 0.0);
    double gamma0 = opt_num(c.cfg, "gamma0_rad_s", 2 * kPi * 8e6);
    size_t k = (size_t)opt_num(c.cfg, "transitions", 6);

    cavsim_emitter *raw = nullptr;
    ck(cavsim_emitter_nv_default(&raw), "emitter");
    emitter_ptr truth(raw, &cavsim_emitter_destroy);
    std::vector<double> y(wl.size());
    ck(cavsim_emitter_spectrum(truth.get(), wl.data(), wl.size(), y.data()),
       "spectrum");
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    if (noise > 0)
        for (double &v : y) v *= 1.0 + noise * n01(rng);

    cavsim_emitter *fit_raw = nullptr;
    double rms = 0;
    cavsim_status st = cavsim_fit_emitter_model(wl.data(), y.data(), wl.size(), k,
                                                nullptr, gamma0, &fit_raw, &rms);
    if (st != CAVSIM_OK && st != CAVSIM_ERR_NO_CONVERGENCE)
        ck(st, "model fit");
    emitter_ptr fitted(fit_raw, &cavsim_emitter_destroy);
    bool converged = st == CAVSIM_OK;
    vlog(c, std::string("fit ") + (converged ? "converged" : "did not converge") +
                ", rms=" + std::to_string(rms));

    out_file d(c, "fit_spectrum_data.csv");
    std::fprintf(d.get(), "wavelength_nm,value\n");
    for (size_t i = 0; i < wl.size(); ++i)
        std::fprintf(d.get(), "%.10g,%.10g\n", wl[i], y[i]);
    d.close();

    std::vector<double> ym(wl.size());
    ck(cavsim_emitter_spectrum(fitted.get(), wl.data(), wl.size(), ym.data()),
       "fitted spectrum");
    out_file m(c, "fit_spectrum_model.csv");
    std::fprintf(m.get(), "wavelength_nm,value\n");
    for (size_t i = 0; i < wl.size(); ++i)
        std::fprintf(m.get(), "%.10g,%.10g\n", wl[i], ym[i]);
    m.close();

    out_file r(c, "fit_report.txt");
    std::fprintf(r.get(), "converged=%s\nrms_rel=%.6g\ntransitions=%zu\n",
                 converged ? "yes" : "no", rms, k);
    for (size_t i = 0; i < cavsim_emitter_transition_count(fitted.get()); ++i) {
        double om = 0, w = 0, deph = 0;
        ck(cavsim_emitter_transition_get(fitted.get(), i, &om, &w, &deph),
           "transition");
        std::fprintf(r.get(),
                     "weight_%zu=%.6g\ndephasing_%zu_rad_s=%.6g\n", i, w, i,
                     deph);
    }
    r.close();
    return converged ? 0 : 3;
}

/* ---------------- fit-saturation ---------------- */

int run_fit_saturation(ctx &c) {
    std::vector<double> inten, counts;
    double isat_true = -1;
    if (c.cfg.contains("data")) {
        for (const json &row : c.cfg.at("data")) {
            if (!row.is_array() || row.size() != 2)
                throw config_error("\"data\" rows must be [intensity, counts]");
            inten.push_back(row[0].get<double>());
            counts.push_back(row[1].get<double>());
        }
    } else {
        double p_inf = need_num(c.cfg, "p_inf");
        isat_true = need_num(c.cfg, "i_sat_gw_m2");
        double a = opt_num(c.cfg, "background_slope", p_inf / (8 * isat_true));
        size_t n = (size_t)opt_num(c.cfg, "points", 25);
        double noise = opt_num(c.cfg, "noise", 0.0);
        inten = geomspace(opt_num(c.cfg, "i_min_gw_m2", 0.1),
                          opt_num(c.cfg, "i_max_gw_m2", 35.0), n);
        counts.resize(n);
        std::mt19937_64 rng(c.seed);
        std::normal_distribution<double> n01(0.0, 1.0);
        for (size_t i = 0; i < n; ++i) {
            double p = p_inf * inten[i] / (isat_true + inten[i]) + a * inten[i];
            counts[i] = noise > 0 ? p * (1.0 + noise * n01(rng)) : p;
        }
    }

    cavsim_saturation_fit fit;
    ck(cavsim_fit_saturation(inten.data(), counts.data(), inten.size(), &fit),
       "saturation fit");

    out_file d(c, "saturation_data.csv");
    std::fprintf(d.get(), "intensity_GW_m2,counts_per_s\n");
    for (size_t i = 0; i < inten.size(); ++i)
        std::fprintf(d.get(), "%.10g,%.10g\n", inten[i], counts[i]);
    d.close();

    out_file r(c, "saturation_report.txt");
    std::fprintf(r.get(),
                 "p_inf=%.10g\ni_sat_GW_m2=%.10g\nbackground_slope=%.10g\n"
                 "rms_rel=%.6g\n",
                 fit.p_inf, fit.i_sat, fit.a, fit.rms_rel);
    if (isat_true > 0)
        std::fprintf(r.get(), "isat_true_GW_m2=%.10g\nisat_rel_err=%.6f\n",
                     isat_true, std::abs(fit.i_sat / isat_true - 1.0));
    if (c.cfg.contains("beam")) {
        const json &bm = c.cfg.at("beam");
        double inten_peak = 0;
        ck(cavsim_intensity_from_power(need_num(bm, "power_w"),
                                       need_num(bm, "waist_um"), &inten_peak),
           "beam intensity");
        std::fprintf(r.get(), "beam_peak_intensity_GW_m2=%.10g\n", inten_peak);
    }
    r.close();
    return 0;
}

/* ---------------- outlook ---------------- */

int run_outlook(ctx &c) {
    double lam = need_num(c.cfg, "wavelength_nm");
    double d = need_num(c.cfg, "d_eff_um");
    double roc = need_num(c.cfg, "roc_um");
    cavsim_budget b = budget_from(c.cfg);
    cavsim_strong_coupling_report rep;
    ck(cavsim_strong_coupling(lam, d, roc, &b, need_num(c.cfg, "zeta0"),
                              need_num(c.cfg, "eta_e"),
                              need_num(c.cfg, "gamma0_rad_s"),
                              need_num(c.cfg, "dephasing_rad_s"), &rep),
       "strong coupling");
    cavsim_geometry g{d, roc, lam};
    double v = 0;
    ck(cavsim_mode_volume_um3(&g, &v), "mode volume");

    out_file r(c, "outlook_report.txt");
    std::fprintf(r.get(),
                 "wavelength_nm=%.10g\nd_eff_um=%.10g\nroc_um=%.10g\n"
                 "mode_volume_um3=%.10g\nfinesse=%.10g\n"
                 "kappa_over_2pi_Hz=%.10g\ntwo_g00_over_2pi_Hz=%.10g\n"
                 "C_rate=%.10g\nstrong_coupling=%s\n",
                 lam, d, roc, v, rep.finesse, rep.kappa_rad_s / (2 * kPi),
                 2 * rep.g00_rad_s / (2 * kPi), rep.c_rate,
                 rep.strong ? "yes" : "no");
    r.close();
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"fiber Fabry-Perot microcavity + color-center toolkit"};
    app.require_subcommand(1);
    ctx c;
    std::string config_path, out_dir = "out";
    app.add_option("--config", config_path, "JSON config (// comments allowed)");
    app.add_option("--out", out_dir, "output directory (created if needed)");
    app.add_option("--seed", c.seed, "seed for synthetic data");
    app.add_flag("--verbose", c.verbose, "progress detail on stderr");

    CLI::App *cmd_tmm = app.add_subcommand("tmm", "mirror stack response");
    CLI::App *cmd_cavity = app.add_subcommand("cavity", "geometry and loss budget");
    CLI::App *cmd_sweep =
        app.add_subcommand("purcell-sweep", "enhancement vs volume or quality");
    CLI::App *cmd_analyze =
        app.add_subcommand("analyze", "spectrum analysis round trip");
    CLI::App *cmd_fit_spec =
        app.add_subcommand("fit-spectrum", "fit the multi-line emission model");
    CLI::App *cmd_fit_sat =
        app.add_subcommand("fit-saturation", "fit a saturation curve");
    CLI::App *cmd_outlook =
        app.add_subcommand("outlook", "low-loss short-cavity projection");
    for (CLI::App *s : {cmd_tmm, cmd_cavity, cmd_sweep, cmd_analyze, cmd_fit_spec,
                        cmd_fit_sat, cmd_outlook})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        c.out_dir = out_dir;
        load_config(config_path, c);
        if (cmd_tmm->parsed()) return run_tmm(c);
        if (cmd_cavity->parsed()) return run_cavity(c);
        if (cmd_sweep->parsed()) return run_sweep(c);
        if (cmd_analyze->parsed()) return run_analyze(c);
        if (cmd_fit_spec->parsed()) return run_fit_spectrum(c);
        if (cmd_fit_sat->parsed()) return run_fit_saturation(c);
        if (cmd_outlook->parsed()) return run_outlook(c);
        return 2;
    } catch (const config_error &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const run_error &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
