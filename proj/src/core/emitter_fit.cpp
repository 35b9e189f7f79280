#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "emitter.hpp"
#include "errors.hpp"
#include "numerics.hpp"

namespace cavsim {

namespace {

constexpr double v_unit = 2.0 * pi * 1e12;  // dephasing carried in 2pi-THz

struct eval_ctx {
    const double *lam;
    const double *y;
    std::size_t n;
    const std::vector<double> *omega;
    std::vector<double> den;      // residual denominators
    std::vector<double> omega_i;  // grid in angular frequency
    std::vector<double> jac_i;    // |domega/dlambda|
};

// residual r_i = (model_i - y_i)/den_i and its Jacobian wrt (u, v),
// zeta_k = u_k^2, gstar_k = (v_k * v_unit)^2 ... v in sqrt units
void residuals(const eval_ctx &c, const Eigen::VectorXd &x, Eigen::VectorXd &r,
               Eigen::MatrixXd *J) {
    std::size_t K = c.omega->size();
    for (std::size_t i = 0; i < c.n; ++i) {
        double model = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            double zeta = x[long(k)] * x[long(k)];
            double g = x[long(K + k)] * x[long(K + k)] * v_unit;
            double d = c.omega_i[i] - (*c.omega)[k];
            double q = d * d + 0.25 * g * g;
            double L = (g / (2.0 * pi)) / q;
            model += zeta * L;
            if (J) {
                double dLdg = (1.0 / (2.0 * pi)) * (d * d - 0.25 * g * g) / (q * q);
                (*J)(long(i), long(k)) =
                    c.jac_i[i] * L * 2.0 * x[long(k)] / c.den[i];
                (*J)(long(i), long(K + k)) = c.jac_i[i] * zeta * dLdg *
                                             2.0 * x[long(K + k)] * v_unit /
                                             c.den[i];
            }
        }
        r[long(i)] = (c.jac_i[i] * model - c.y[i]) / c.den[i];
    }
}

} // namespace

emitter_fit_result fit_emitter(const double *wavelengths_nm,
                               const double *values, std::size_t n,
                               const std::vector<double> &omega_comb_rad_s,
                               double gamma0_rad_s) {
    std::size_t K = omega_comb_rad_s.size();
    require(K >= 1, "need at least one transition");
    require(gamma0_rad_s > 0.0, "radiative rate must be positive");
    require(n >= 20 * K, "need at least 10 samples per free parameter");
    require(strictly_increasing(wavelengths_nm, n),
            "wavelength grid must be strictly increasing");
    require(wavelengths_nm[0] > 0.0, "wavelengths must be positive");
    for (std::size_t k = 0; k < K; ++k) {
        require(omega_comb_rad_s[k] > 0.0, "comb frequencies must be positive");
        if (k > 0)
            require(omega_comb_rad_s[k] < omega_comb_rad_s[k - 1],
                    "comb frequencies must decrease");
    }
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        require(std::isfinite(values[i]), "non-finite spectrum value");
        peak = std::max(peak, std::abs(values[i]));
    }
    require(peak > 0.0, "all-zero spectrum");

    eval_ctx c;
    c.lam = wavelengths_nm;
    c.y = values;
    c.n = n;
    c.omega = &omega_comb_rad_s;
    c.den.resize(n);
    c.omega_i.resize(n);
    c.jac_i.resize(n);
    double floor = 1e-6 * peak;
    for (std::size_t i = 0; i < n; ++i) {
        c.den[i] = std::max(std::abs(values[i]), floor);
        c.omega_i[i] = omega_from_lambda_nm(wavelengths_nm[i]);
        c.jac_i[i] = 2.0 * pi * c_nm_s /
                     (wavelengths_nm[i] * wavelengths_nm[i]);
    }

    // start from the displaced-oscillator prior and a mid-range width
    std::vector<double> prior = franck_condon(3.2, K - 1);
    long P = long(2 * K);
    Eigen::VectorXd x(P);
    for (std::size_t k = 0; k < K; ++k) {
        x[long(k)] = std::sqrt(std::max(prior[k], 1e-4));
        x[long(K + k)] = std::sqrt(25.0);
    }

    Eigen::VectorXd r(static_cast<long>(n));
    Eigen::MatrixXd J(static_cast<long>(n), P);
    residuals(c, x, r, &J);
    double cost = 0.5 * r.squaredNorm();

    double mu = 0.0, nu = 2.0;
    bool converged = false;
    for (int iter = 0; iter < 400; ++iter) {
        Eigen::MatrixXd JtJ = J.transpose() * J;
        Eigen::VectorXd g = J.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < 1e-10) { converged = true; break; }
        if (mu == 0.0) mu = 1e-3 * JtJ.diagonal().maxCoeff();
        bool accepted = false;
        for (int tries = 0; tries < 30 && !accepted; ++tries) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += mu;
            Eigen::VectorXd step = A.ldlt().solve(-g);
            if (step.norm() <= 1e-12 * (x.norm() + 1e-12)) {
                converged = true;
                accepted = true;
                break;
            }
            Eigen::VectorXd xt = x + step;
            Eigen::VectorXd rt(static_cast<long>(n));
            residuals(c, xt, rt, nullptr);
            double cost_t = 0.5 * rt.squaredNorm();
            double predicted = -step.dot(g) - 0.5 * mu * step.squaredNorm();
            double rho = predicted > 0.0 ? (cost - cost_t) / predicted : -1.0;
            if (cost_t < cost && rho > 0.0) {
                double rel_drop = (cost - cost_t) / std::max(cost, 1e-300);
                x = xt;
                residuals(c, x, r, &J);
                cost = cost_t;
                mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
                nu = 2.0;
                accepted = true;
                if (rel_drop < 1e-14) converged = true;
            } else {
                mu *= nu;
                nu *= 2.0;
            }
        }
        if (converged) break;
        if (!accepted) { converged = true; break; }  // stuck in a flat basin
    }

    emitter_fit_result out;
    out.converged = converged;
    out.model.gamma0_rad_s = gamma0_rad_s;
    out.model.huang_rhys = 0.0;  // not identified by this fit
    for (std::size_t k = 0; k < K; ++k) {
        transition t;
        t.omega_rad_s = omega_comb_rad_s[k];
        t.weight = x[long(k)] * x[long(k)];
        t.dephasing_rad_s = x[long(K + k)] * x[long(K + k)] * v_unit;
        out.model.transitions.push_back(t);
    }
    // report the absolute RMS misfit relative to the spectrum peak
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double misfit = r[long(i)] * c.den[i];
        acc += misfit * misfit;
    }
    out.rms_rel = std::sqrt(acc / double(n)) / peak;
    return out;
}

} // namespace cavsim
