#include "dmatch/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "dmatch/errors.hpp"

namespace dmatch {

double layer3_command(double k1, double k2, double psi5, double psi6, double g_out) {
    return k1 * psi5 + k2 * psi6 + g_out;
}

double layer2_command(const GainSet& g, double w_tilde2,
                      double y2_delayed, double y2dot_delayed) {
    return -g.rho1 * y2dot_delayed - g.rho0 * y2_delayed + g.kappa * w_tilde2;
}

Voltages layer1_voltages(const PlantConfig& cfg, const GainSet& g,
                         double w1, double w2,
                         double ytilde1, double ytilde1_dot,
                         double ytilde2_dot, double ytilde2_ddot) {
    if (cfg.a15 == 0.0 || cfg.a26 == 0.0) {
        throw DegenerateConfig("a15 and a26 must be non-zero");
    }
    const double d1 = 2.0 * cfg.a15;
    const double d2 = 2.0 * cfg.a26;
    const double u1 =
        g.lambda01 / d1 * w1 + g.lambda02 / d2 * w2
        + cfg.a25 / d2 * ytilde1_dot * ytilde2_dot
        + cfg.a23 / d2 * ytilde1 * ytilde2_ddot
        + cfg.a13 / d1 * ytilde2_dot * ytilde2_ddot
        + (cfg.a21 - g.lambda12) / d2 * ytilde2_ddot
        + (cfg.a11 - g.lambda11) / d1 * ytilde1_dot
        + cfg.a14 / d1 * ytilde2_dot * ytilde2_dot
        + cfg.a24 / d2 * ytilde1 * ytilde2_dot
        + (cfg.a22 - g.lambda02) / d2 * ytilde2_dot
        + (cfg.a12 - g.lambda01) / d1 * ytilde1;
    const double u2 =
        g.lambda01 / d1 * w1 - g.lambda02 / d2 * w2
        - cfg.a25 / d2 * ytilde1_dot * ytilde2_dot
        - cfg.a23 / d2 * ytilde1 * ytilde2_ddot
        + cfg.a13 / d1 * ytilde2_dot * ytilde2_ddot
        + (cfg.a11 - g.lambda11) / d1 * ytilde1_dot
        + cfg.a14 / d1 * ytilde2_dot * ytilde2_dot
        - cfg.a24 / d2 * ytilde1 * ytilde2_dot
        + (g.lambda02 - cfg.a22) / d2 * ytilde2_dot
        + (cfg.a12 - g.lambda01) / d1 * ytilde1;
    return Voltages{u1, u2};
}

Measurements measurement_map(const DelayLine& y2_line, const DelayLine& y2dot_line,
                             double y1, double y1dot, double y2dot, double y2ddot,
                             double r_w, double b_w, double t, double tau) {
    if (!(r_w > 0.0) || !(b_w > 0.0)) {
        throw DegenerateConfig("wheel geometry must be positive");
    }
    Measurements m{};
    m.psi1 = (y1 - b_w * y2dot) / r_w;
    m.psi2 = (y1 + b_w * y2dot) / r_w;
    m.psi3 = (y1dot - b_w * y2ddot) / r_w;
    m.psi4 = (y1dot + b_w * y2ddot) / r_w;
    m.psi5 = y2_line.sample(t - tau);
    m.psi6 = y2dot_line.sample(t - tau);
    return m;
}

GRealization::GRealization(const ChiParams& chi, const ModelSpec& model) {
    // Validates chi, properness and model stability.
    (void)build_precompensator(chi, model);
    num_ = model.num_coeffs();
    den_ = model.den_coeffs();
    nn_ = static_cast<int>(num_.size()) - 1;
    nd_ = static_cast<int>(den_.size()) - 1;
    scale_ = (1.0 - chi.k2 * chi.chi1) / (chi.chi1 * chi.chi3);
    c2_ = chi.chi1 + chi.chi2;
    c1_ = chi.chi1 * chi.chi2;
    b1_ = chi.chi3;
    b0_ = chi.chi1 * chi.chi3;
}

std::vector<double> GRealization::equilibrium_state(double r) const {
    std::vector<double> phi(static_cast<std::size_t>(nd_), 0.0);
    phi[0] = r / den_[0];
    return phi;
}

void GRealization::derivatives(std::span<const double> phi, double r,
                               std::span<double> dphi) const {
    for (int i = 0; i + 1 < nd_; ++i) {
        dphi[static_cast<std::size_t>(i)] = phi[static_cast<std::size_t>(i + 1)];
    }
    double top = r;
    for (int i = 0; i < nd_; ++i) {
        top -= den_[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i)];
    }
    dphi[static_cast<std::size_t>(nd_ - 1)] = top / den_[static_cast<std::size_t>(nd_)];
}

GRealization::Outputs GRealization::outputs(std::span<const double> phi, double r) const {
    double top = r;
    for (int i = 0; i < nd_; ++i) {
        top -= den_[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i)];
    }
    top /= den_[static_cast<std::size_t>(nd_)];
    auto phi_at = [&](int i) { return i == nd_ ? top : phi[static_cast<std::size_t>(i)]; };
    Outputs o{};
    for (int i = 0; i <= nn_; ++i) {
        const double n = num_[static_cast<std::size_t>(i)];
        o.q += n * phi_at(i);
        o.q1 += n * phi_at(i + 1);
        o.q2 += n * phi_at(i + 2);
        o.q3 += n * phi_at(i + 3);
    }
    return o;
}

double GRealization::output(const Outputs& o, double q_delayed, double q1_delayed) const {
    return scale_ * (o.q3 + c2_ * o.q2 + c1_ * o.q1 + b1_ * q1_delayed + b0_ * q_delayed);
}

std::complex<double> GRealization::frequency_response(std::complex<double> s, double tau) const {
    auto horner = [&](const std::vector<double>& c) {
        std::complex<double> v = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) {
            v = v * s + c[i];
        }
        return v;
    };
    const std::complex<double> z = std::exp(-s * tau);
    const std::complex<double> pa = ((s + c2_) * s + c1_) * s + z * (b1_ * s + b0_);
    return scale_ * pa * horner(num_) / horner(den_);
}

SimScenario make_step_scenario(const ChiParams& chi, const GainSet& gains,
                               const ModelSpec& model, double tau,
                               double ybar1, double ybar2,
                               double w1_step_frac, double r_step_frac) {
    SimScenario sc{chi, gains, model, tau};
    sc.ybar1 = ybar1;
    sc.ybar2 = ybar2;
    sc.w1_cmd = StepCommand{ybar1, w1_step_frac * ybar1, 0.0};
    sc.r_cmd = StepCommand{ybar2, r_step_frac * ybar2, 0.0};
    sc.y1_0 = ybar1;
    sc.y2_0 = ybar2;
    return sc;
}

double Trajectory::max_abs_err() const {
    double m = 0.0;
    for (double e : err) {
        m = std::max(m, std::abs(e));
    }
    return m;
}

namespace {
constexpr double kOverflowBound = 1e12;
} // namespace

Trajectory integrate_closed_loop(const SimScenario& sc) {
    if (!(sc.h > 0.0) || !(sc.horizon > 0.0) || sc.tau < 0.0) {
        throw std::invalid_argument("scenario needs h > 0, horizon > 0, tau >= 0");
    }
    if (sc.tau > 0.0 && sc.h > sc.tau / 10.0 * (1.0 + 1e-12)) {
        throw std::invalid_argument("scenario needs h <= tau/10 when tau > 0");
    }
    if (const auto& tc = sc.model.time_constants()) {
        double tmax = 0.0;
        for (double t : *tc) {
            tmax = std::max(tmax, t);
        }
        if (sc.horizon < 10.0 * tmax) {
            throw std::invalid_argument("scenario horizon shorter than 10x the slowest model time constant");
        }
    }
    // Gain consistency gate; throws GainInconsistency on a tampered set.
    (void)build_inner_tf(sc.gains);

    const GRealization greal(sc.chi, sc.model);
    const int nd = greal.state_dim();
    const int dim = 5 + nd; // y1, y1', y2, y2', y2'', phi[0..nd-1]

    const GainSet& g = sc.gains;
    const double k1 = g.k1;
    const double k2 = g.k2;

    std::vector<double> x(static_cast<std::size_t>(dim));
    x[0] = sc.y1_0;
    x[1] = sc.y1dot_0;
    x[2] = sc.y2_0;
    x[3] = sc.y2dot_0;
    x[4] = sc.y2ddot_0;
    const double r0 = sc.r_cmd.value(-1.0); // pre-step command level
    const auto phi0 = greal.equilibrium_state(r0);
    for (int i = 0; i < nd; ++i) {
        x[static_cast<std::size_t>(5 + i)] = phi0[static_cast<std::size_t>(i)];
    }

    const std::size_t capacity =
        sc.tau > 0.0 ? static_cast<std::size_t>(std::ceil(sc.tau / sc.h)) + 8 : 8;
    const auto init_out = greal.outputs(std::span<const double>(x).subspan(5), r0);
    DelayLine line_y2(0.0, sc.h, x[2], capacity);
    DelayLine line_y2dot(0.0, sc.h, x[3], capacity);
    DelayLine line_q(0.0, sc.h, init_out.q, capacity);
    DelayLine line_qdot(0.0, sc.h, init_out.q1, capacity);

    // Derivative of the full loop at stage time ts for stage state xs.
    std::vector<double> dx(static_cast<std::size_t>(dim));
    auto deriv = [&](double ts, const std::vector<double>& xs, std::vector<double>& out) {
        const double r_val = sc.r_cmd.value(ts);
        const double w1_val = sc.w1_cmd.value(ts);
        const auto phi = std::span<const double>(xs).subspan(5);
        const auto o = greal.outputs(phi, r_val);
        double y2_del, y2dot_del, q_del, qdot_del;
        if (sc.tau > 0.0) {
            y2_del = line_y2.sample(ts - sc.tau);
            y2dot_del = line_y2dot.sample(ts - sc.tau);
            q_del = line_q.sample(ts - sc.tau);
            qdot_del = line_qdot.sample(ts - sc.tau);
        } else {
            y2_del = xs[2];
            y2dot_del = xs[3];
            q_del = o.q;
            qdot_del = o.q1;
        }
        const double g_out = greal.output(o, q_del, qdot_del);
        const double w_tilde2 = layer3_command(k1, k2, y2_del, y2dot_del, g_out);

        out[0] = xs[1];
        out[1] = -g.lambda11 * xs[1] - g.lambda01 * xs[0] + g.lambda01 * w1_val;
        out[2] = xs[3];
        out[3] = xs[4];
        out[4] = -g.lambda12 * xs[4] - g.lambda02 * xs[3]
               - g.lambda02 * g.rho1 * y2dot_del - g.lambda02 * g.rho0 * y2_del
               + g.lambda02 * g.kappa * w_tilde2;
        greal.derivatives(phi, r_val, std::span<double>(out).subspan(5));
    };

    const auto n_steps = static_cast<std::size_t>(std::llround(sc.horizon / sc.h));
    Trajectory traj;
    const std::size_t n_rows = n_steps + 1;
    for (auto* v : {&traj.t, &traj.r, &traj.w1, &traj.w_tilde2, &traj.w2, &traj.y1,
                    &traj.y2, &traj.y2dot, &traj.psi5, &traj.psi6, &traj.g_out,
                    &traj.y2_ref, &traj.err}) {
        v->reserve(n_rows);
    }
    if (sc.plant) {
        traj.u1.reserve(n_rows);
        traj.u2.reserve(n_rows);
    }

    auto record = [&](double t) {
        const double r_val = sc.r_cmd.value(t);
        const double w1_val = sc.w1_cmd.value(t);
        const auto phi = std::span<const double>(x).subspan(5);
        const auto o = greal.outputs(phi, r_val);
        double y2_del, y2dot_del, q_del, qdot_del;
        if (sc.tau > 0.0) {
            y2_del = line_y2.sample(t - sc.tau);
            y2dot_del = line_y2dot.sample(t - sc.tau);
            q_del = line_q.sample(t - sc.tau);
            qdot_del = line_qdot.sample(t - sc.tau);
        } else {
            y2_del = x[2];
            y2dot_del = x[3];
            q_del = o.q;
            qdot_del = o.q1;
        }
        const double g_out = greal.output(o, q_del, qdot_del);
        const double w_tilde2 = layer3_command(k1, k2, y2_del, y2dot_del, g_out);
        const double w2 = layer2_command(g, w_tilde2, y2_del, y2dot_del);
        double ref;
        if (sc.model.time_constants()) {
            ref = sc.r_cmd.base
                + analytic_reference(sc.model, sc.r_cmd.amplitude, t - sc.r_cmd.step_time);
        } else {
            ref = o.q; // model output of the realization itself
        }
        traj.t.push_back(t);
        traj.r.push_back(r_val);
        traj.w1.push_back(w1_val);
        traj.w_tilde2.push_back(w_tilde2);
        traj.w2.push_back(w2);
        traj.y1.push_back(x[0]);
        traj.y2.push_back(x[2]);
        traj.y2dot.push_back(x[3]);
        traj.psi5.push_back(y2_del);
        traj.psi6.push_back(y2dot_del);
        traj.g_out.push_back(g_out);
        traj.y2_ref.push_back(ref);
        traj.err.push_back(x[2] - ref);
        if (sc.plant) {
            const auto v = layer1_voltages(*sc.plant, g, w1_val, w2, x[0], x[1], x[3], x[4]);
            traj.u1.push_back(v.u1);
            traj.u2.push_back(v.u2);
        }
    };

    record(0.0);

    std::vector<double> k1v(x.size()), k2v(x.size()), k3v(x.size()), k4v(x.size());
    std::vector<double> xs(x.size());
    for (std::size_t m = 0; m < n_steps; ++m) {
        const double t = static_cast<double>(m) * sc.h;
        deriv(t, x, k1v);
        for (std::size_t i = 0; i < x.size(); ++i) {
            xs[i] = x[i] + 0.5 * sc.h * k1v[i];
        }
        deriv(t + 0.5 * sc.h, xs, k2v);
        for (std::size_t i = 0; i < x.size(); ++i) {
            xs[i] = x[i] + 0.5 * sc.h * k2v[i];
        }
        deriv(t + 0.5 * sc.h, xs, k3v);
        for (std::size_t i = 0; i < x.size(); ++i) {
            xs[i] = x[i] + sc.h * k3v[i];
        }
        deriv(t + sc.h, xs, k4v);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += sc.h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        const double t_new = static_cast<double>(m + 1) * sc.h;

        bool overflow = false;
        for (double v : x) {
            if (!std::isfinite(v) || std::abs(v) > kOverflowBound) {
                overflow = true;
            }
        }
        if (overflow) {
            traj.diverged = true;
            traj.diverged_at = t_new;
            break;
        }

        const double r_new = sc.r_cmd.value(t_new);
        const auto o_new = greal.outputs(std::span<const double>(x).subspan(5), r_new);
        line_y2.push(t_new, x[2]);
        line_y2dot.push(t_new, x[3]);
        line_q.push(t_new, o_new.q);
        line_qdot.push(t_new, o_new.q1);
        record(t_new);
    }
    return traj;
}

std::vector<std::pair<double, double>> integrate_scalar_dde(
    double a, double b, double tau, double y0, double h, double horizon) {
    if (!(h > 0.0) || !(horizon > 0.0) || !(tau > 0.0) || h > tau / 10.0 * (1.0 + 1e-12)) {
        throw std::invalid_argument("need h > 0, horizon > 0, tau > 0, h <= tau/10");
    }
    const std::size_t capacity = static_cast<std::size_t>(std::ceil(tau / h)) + 8;
    DelayLine line(0.0, h, y0, capacity);
    auto deriv = [&](double ts, double ys) { return a * ys + b * line.sample(ts - tau); };
    const auto n = static_cast<std::size_t>(std::llround(horizon / h));
    std::vector<std::pair<double, double>> out;
    out.reserve(n + 1);
    double y = y0;
    out.emplace_back(0.0, y);
    for (std::size_t m = 0; m < n; ++m) {
        const double t = static_cast<double>(m) * h;
        const double s1 = deriv(t, y);
        const double s2 = deriv(t + 0.5 * h, y + 0.5 * h * s1);
        const double s3 = deriv(t + 0.5 * h, y + 0.5 * h * s2);
        const double s4 = deriv(t + h, y + h * s3);
        y += h / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
        const double t_new = static_cast<double>(m + 1) * h;
        line.push(t_new, y);
        out.emplace_back(t_new, y);
    }
    return out;
}

namespace {

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) {
        v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return v;
}

} // namespace

double analytic_reference(const ModelSpec& m, double amplitude, double t) {
    const auto& tc = m.time_constants();
    if (!tc) {
        throw std::invalid_argument("analytic_reference requires a time-constant model");
    }
    if (t <= 0.0) {
        return 0.0;
    }
    // Group near-equal time constants; nearly coincident poles make the
    // distinct-pole residues cancel catastrophically, so they take the
    // confluent branch together.
    struct Group {
        double rep;
        int mult;
    };
    std::vector<Group> groups;
    for (double ti : *tc) {
        bool merged = false;
        for (auto& grp : groups) {
            if (std::abs(ti - grp.rep) <= 1e-9 * std::max(ti, grp.rep)) {
                grp.rep = (grp.rep * grp.mult + ti) / (grp.mult + 1);
                ++grp.mult;
                merged = true;
                break;
            }
        }
        if (!merged) {
            groups.push_back({ti, 1});
        }
    }

    double gain = amplitude;
    for (const auto& grp : groups) {
        gain /= std::pow(grp.rep, grp.mult);
    }

    // Y(s) = gain / (s * prod (s - p_g)^{m_g}); response = amplitude plus the
    // pole-group terms from confluent partial fractions.
    double y = amplitude;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const double p = -1.0 / groups[gi].rep;
        const int mult = groups[gi].mult;
        // Derivatives of G(s) = gain / (s * prod_{h != g}(s - p_h)^{m_h}) at p
        // via the logarithmic-derivative recursion G' = G L.
        double g0 = gain / p;
        for (std::size_t hi = 0; hi < groups.size(); ++hi) {
            if (hi == gi) {
                continue;
            }
            g0 /= std::pow(p + 1.0 / groups[hi].rep, groups[hi].mult);
        }
        std::vector<double> gd{g0}; // G^{(j)}(p)
        std::vector<double> ld;     // L^{(r)}(p)
        for (int r = 0; r < mult - 1; ++r) {
            double fact = 1.0;
            for (int i = 2; i <= r; ++i) {
                fact *= i;
            }
            double sum = 1.0 / std::pow(p, r + 1);
            for (std::size_t hi = 0; hi < groups.size(); ++hi) {
                if (hi == gi) {
                    continue;
                }
                sum += groups[hi].mult / std::pow(p + 1.0 / groups[hi].rep, r + 1);
            }
            ld.push_back(((r % 2 == 0) ? -1.0 : 1.0) * fact * sum);
        }
        for (int n = 1; n < mult; ++n) {
            double v = 0.0;
            for (int j = 0; j < n; ++j) {
                v += binom(n - 1, j) * gd[static_cast<std::size_t>(j)]
                   * ld[static_cast<std::size_t>(n - 1 - j)];
            }
            gd.push_back(v);
        }
        // A_{g,k} = G^{(m-k)}(p)/(m-k)!, term A_{g,k} t^{k-1} e^{pt}/(k-1)!.
        const double ept = std::exp(p * t);
        double tpow = 1.0; // t^{k-1}
        double kfact = 1.0;
        for (int k = 1; k <= mult; ++k) {
            double dfact = 1.0;
            for (int i = 2; i <= mult - k; ++i) {
                dfact *= i;
            }
            y += gd[static_cast<std::size_t>(mult - k)] / dfact * tpow * ept / kfact;
            tpow *= t;
            kfact *= k;
        }
    }
    return y;
}

double analytic_reference_second_order(double lambda01, double lambda11,
                                       double amplitude, double t) {
    if (!(lambda01 > 0.0) || !(lambda11 > 0.0)) {
        throw std::invalid_argument("second-order reference needs positive gains");
    }
    if (t <= 0.0) {
        return 0.0;
    }
    const double disc = lambda11 * lambda11 / 4.0 - lambda01;
    if (std::abs(disc) <= 1e-9 * lambda01) {
        const double p = -lambda11 / 2.0;
        return amplitude * (1.0 - std::exp(p * t) * (1.0 - p * t));
    }
    if (disc > 0.0) {
        const double root = std::sqrt(disc);
        const double p1 = -lambda11 / 2.0 + root;
        const double p2 = -lambda11 / 2.0 - root;
        return amplitude
             * (1.0 + (p2 * std::exp(p1 * t) - p1 * std::exp(p2 * t)) / (p1 - p2));
    }
    const double wn = std::sqrt(lambda01);
    const double zeta = lambda11 / (2.0 * wn);
    const double wd = wn * std::sqrt(1.0 - zeta * zeta);
    return amplitude
         * (1.0 - std::exp(-zeta * wn * t)
                * (std::cos(wd * t) + zeta * wn / wd * std::sin(wd * t)));
}

} // namespace dmatch
