#include "hsaa/problems/waveholtz.hpp"

#include <Eigen/Sparse>
#include <cmath>

#include "hsaa/errors.hpp"
#include "hsaa/tridiag.hpp"

namespace hsaa {

namespace {

/// Smallest even step count with T/nt <= cfl * h / max(c); even nt keeps the
/// trapezoid filter symmetric over the period.
int choose_steps(double period, double cfl, double h, double cmax) {
    if (!(cfl > 0.0) || cfl > 1.0) {
        throw std::invalid_argument("waveholtz: cfl must lie in (0, 1]");
    }
    const double dt_max = cfl * h / cmax;
    int nt = static_cast<int>(std::ceil(period / dt_max));
    if (nt % 2 != 0) ++nt;
    if (nt < 2) nt = 2;
    return nt;
}

double filter_weight(double t, double omega) { return std::cos(omega * t) - 0.25; }

}  // namespace

// --- 1D stepper ---

WaveStepper1D::WaveStepper1D(Eigen::VectorXd speed, double h, double dt)
    : n_(speed.size() - 2), h_(h), dt_(dt) {
    if (speed.size() < 3) throw std::invalid_argument("WaveStepper1D: need at least one interior node");
    if ((speed.array() <= 0.0).any()) throw std::invalid_argument("WaveStepper1D: speeds must be positive");
    kappa_ = speed.array().square();
}

Eigen::VectorXd WaveStepper1D::apply_operator(const Eigen::VectorXd& w) const {
    Eigen::VectorXd lw(n_);
    const double s = 1.0 / (2.0 * h_ * h_);
    for (Eigen::Index i = 0; i < n_; ++i) {
        const Eigen::Index p = i + 1;  // node index
        const double left = (i > 0) ? w[i - 1] : 0.0;
        const double right = (i + 1 < n_) ? w[i + 1] : 0.0;
        lw[i] = s * ((kappa_[p + 1] + kappa_[p]) * right -
                     (kappa_[p + 1] + 2.0 * kappa_[p] + kappa_[p - 1]) * w[i] +
                     (kappa_[p] + kappa_[p - 1]) * left);
    }
    return lw;
}

Eigen::VectorXd WaveStepper1D::taylor_start(const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& forcing) const {
    return u + (0.5 * dt_ * dt_) * (apply_operator(u) - forcing);
}

Eigen::VectorXd WaveStepper1D::step(const Eigen::VectorXd& wprev, const Eigen::VectorXd& wcur,
                                    const Eigen::VectorXd& forcing, double forcing_weight) const {
    return 2.0 * wcur - wprev + (dt_ * dt_) * (apply_operator(wcur) - forcing_weight * forcing);
}

double WaveStepper1D::energy(const Eigen::VectorXd& wnew, const Eigen::VectorXd& wold) const {
    const Eigen::VectorXd velocity = (wnew - wold) / dt_;
    return 0.5 * velocity.squaredNorm() - 0.5 * wnew.dot(apply_operator(wold));
}

double wave_speed_1d(WaveSpeed1D profile, double x) {
    switch (profile) {
        case WaveSpeed1D::Uniform: return 1.0;
        case WaveSpeed1D::GaussianDip: return 1.0 - 0.55 * std::exp(-144.0 * (x - 0.5) * (x - 0.5));
        case WaveSpeed1D::Inclusion: return std::abs(x - 0.5) < 0.125 ? 0.3 : 1.0;
    }
    return 1.0;
}

// --- 1D problem ---

WaveHoltzProblem1D::WaveHoltzProblem1D(Eigen::Index n, double omega, WaveSpeed1D speed, double cfl,
                                       Eigen::Index source_gridpoint, double target_amplitude)
    : n_(n),
      h_(1.0 / static_cast<double>(n + 1)),
      omega_(omega),
      period_(2.0 * M_PI / omega),
      nt_(0),
      stepper_([&] {
          Eigen::VectorXd c(n + 2);
          for (Eigen::Index p = 0; p <= n + 1; ++p) {
              c[p] = wave_speed_1d(speed, static_cast<double>(p) / static_cast<double>(n + 1));
          }
          const double cmax = c.maxCoeff();
          nt_ = choose_steps(period_, cfl, 1.0 / static_cast<double>(n + 1), cmax);
          return WaveStepper1D(std::move(c), 1.0 / static_cast<double>(n + 1), period_ / nt_);
      }()) {
    if (n < 2) throw std::invalid_argument("WaveHoltzProblem1D: n must be >= 2");
    if (!(omega > 0.0)) throw std::invalid_argument("WaveHoltzProblem1D: omega must be positive");
    if (source_gridpoint < 1 || source_gridpoint > n) {
        throw std::invalid_argument("WaveHoltzProblem1D: source gridpoint out of range");
    }

    // Calibrate the point-source amplitude against the direct Helmholtz
    // solution (L + omega^2) u = f so that max|u| hits the target.
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n_);
    unit[source_gridpoint - 1] = 1.0;
    const double s = 1.0 / (2.0 * h_ * h_);
    Eigen::VectorXd lower(n_ - 1), diag(n_), upper(n_ - 1);
    const Eigen::VectorXd& c2 = [&]() -> Eigen::VectorXd {
        Eigen::VectorXd k(n_ + 2);
        for (Eigen::Index p = 0; p <= n_ + 1; ++p) {
            const double cv = wave_speed_1d(speed, static_cast<double>(p) * h_);
            k[p] = cv * cv;
        }
        return k;
    }();
    for (Eigen::Index i = 0; i < n_; ++i) {
        const Eigen::Index p = i + 1;
        diag[i] = -s * (c2[p + 1] + 2.0 * c2[p] + c2[p - 1]) + omega_ * omega_;
        if (i + 1 < n_) upper[i] = s * (c2[p + 1] + c2[p]);
        if (i > 0) lower[i - 1] = s * (c2[p] + c2[p - 1]);
    }
    const Eigen::VectorXd pilot = tridiag_solve<double>(lower, diag, upper, unit);
    const double amplitude = target_amplitude / pilot.cwiseAbs().maxCoeff();
    forcing_ = amplitude * unit;
}

Eigen::VectorXd WaveHoltzProblem1D::apply_G(const Eigen::VectorXd& u) const {
    if (u.size() != n_) throw std::invalid_argument("WaveHoltzProblem1D: dimension mismatch");
    const double dt = stepper_.dt();
    const double scale = 2.0 / period_ * dt;

    Eigen::VectorXd wprev = stepper_.taylor_start(u, forcing_);
    Eigen::VectorXd wcur = u;
    Eigen::VectorXd acc = (0.5 * scale * filter_weight(0.0, omega_)) * u;
    for (int k = 0; k < nt_; ++k) {
        const double tk = k * dt;
        Eigen::VectorXd wnext = stepper_.step(wprev, wcur, forcing_, std::cos(omega_ * tk));
        const double tk1 = (k + 1) * dt;
        const double trap = (k + 1 == nt_) ? 0.5 : 1.0;
        acc += (trap * scale * filter_weight(tk1, omega_)) * wnext;
        wprev = std::move(wcur);
        wcur = std::move(wnext);
    }
    return acc;
}

std::optional<Eigen::VectorXd> WaveHoltzProblem1D::exact_solution() const {
    if (!reference_enabled_) return std::nullopt;
    if (!cached_solution_) {
        const Eigen::VectorXd b = apply_G(Eigen::VectorXd::Zero(n_));
        Eigen::MatrixXd system(n_, n_);
        for (Eigen::Index j = 0; j < n_; ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
            e[j] = 1.0;
            system.col(j) = e - (apply_G(e) - b);
        }
        cached_solution_ = Eigen::PartialPivLU<Eigen::MatrixXd>(system).solve(b);
    }
    return cached_solution_;
}

// --- 2D stepper ---

WaveStepper2D::WaveStepper2D(Eigen::MatrixXd kappa_nodes, double h, double dt)
    : nx_(kappa_nodes.rows() - 2), h_(h), dt_(dt), kappa_(std::move(kappa_nodes)) {
    if (kappa_.rows() != kappa_.cols() || kappa_.rows() < 3) {
        throw std::invalid_argument("WaveStepper2D: kappa grid must be square, >= 3 nodes");
    }
    if ((kappa_.array() <= 0.0).any()) {
        throw std::invalid_argument("WaveStepper2D: c^2 must be positive");
    }
}

Eigen::VectorXd WaveStepper2D::apply_operator(const Eigen::VectorXd& w) const {
    Eigen::VectorXd lw(nx_ * nx_);
    const double s = 1.0 / (2.0 * h_ * h_);
    auto value = [&](Eigen::Index ix, Eigen::Index iy) -> double {
        if (ix < 0 || iy < 0 || ix >= nx_ || iy >= nx_) return 0.0;  // Dirichlet walls
        return w[iy * nx_ + ix];
    };
    for (Eigen::Index iy = 0; iy < nx_; ++iy) {
        const Eigen::Index py = iy + 1;
        for (Eigen::Index ix = 0; ix < nx_; ++ix) {
            const Eigen::Index px = ix + 1;
            const double center = w[iy * nx_ + ix];
            const double kc = kappa_(px, py);
            const double fx = (kappa_(px + 1, py) + kc) * (value(ix + 1, iy) - center) -
                              (kc + kappa_(px - 1, py)) * (center - value(ix - 1, iy));
            const double fy = (kappa_(px, py + 1) + kc) * (value(ix, iy + 1) - center) -
                              (kc + kappa_(px, py - 1)) * (center - value(ix, iy - 1));
            lw[iy * nx_ + ix] = s * (fx + fy);
        }
    }
    return lw;
}

Eigen::VectorXd WaveStepper2D::taylor_start(const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& forcing) const {
    return u + (0.5 * dt_ * dt_) * (apply_operator(u) - forcing);
}

Eigen::VectorXd WaveStepper2D::step(const Eigen::VectorXd& wprev, const Eigen::VectorXd& wcur,
                                    const Eigen::VectorXd& forcing, double forcing_weight) const {
    return 2.0 * wcur - wprev + (dt_ * dt_) * (apply_operator(wcur) - forcing_weight * forcing);
}

// --- 2D problem ---

double WaveHoltzProblem2D::squared_speed(double x, double y) {
    const bool in_cross = (x >= 0.4 && x <= 0.6) || (y >= 0.4 && y <= 0.6);
    return in_cross ? 0.3 : 1.0;
}

WaveHoltzProblem2D::WaveHoltzProblem2D(Eigen::Index nodes, double omega, double cfl,
                                       double target_amplitude)
    : nodes_(nodes),
      nx_(nodes - 2),
      n_(nx_ * nx_),
      h_(1.0 / static_cast<double>(nodes - 1)),
      omega_(omega),
      period_(2.0 * M_PI / omega),
      nt_(0),
      stepper_([&] {
          Eigen::MatrixXd kappa(nodes, nodes);
          const double hh = 1.0 / static_cast<double>(nodes - 1);
          for (Eigen::Index px = 0; px < nodes; ++px)
              for (Eigen::Index py = 0; py < nodes; ++py) {
                  kappa(px, py) = squared_speed(px * hh, py * hh);
              }
          const double cmax = std::sqrt(kappa.maxCoeff());
          nt_ = choose_steps(period_, cfl, hh, cmax);
          return WaveStepper2D(std::move(kappa), hh, period_ / nt_);
      }()) {
    if (nodes < 5) throw std::invalid_argument("WaveHoltzProblem2D: grid too small");
    if (!(omega > 0.0)) throw std::invalid_argument("WaveHoltzProblem2D: omega must be positive");

    // Interior node nearest (0.25, 0.75).
    const auto nearest = [&](double c) {
        Eigen::Index p = static_cast<Eigen::Index>(std::lround(c / h_));
        p = std::max<Eigen::Index>(1, std::min(nodes_ - 2, p));
        return p - 1;  // interior index
    };
    const Eigen::Index sx = nearest(0.25);
    const Eigen::Index sy = nearest(0.75);
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n_);
    unit[sy * nx_ + sx] = 1.0;

    // Pilot direct Helmholtz solve (L + omega^2) u = f on the interior.
    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<size_t>(5 * n_));
    const double s = 1.0 / (2.0 * h_ * h_);
    Eigen::MatrixXd kappa(nodes, nodes);
    for (Eigen::Index px = 0; px < nodes; ++px)
        for (Eigen::Index py = 0; py < nodes; ++py) kappa(px, py) = squared_speed(px * h_, py * h_);
    for (Eigen::Index iy = 0; iy < nx_; ++iy) {
        const Eigen::Index py = iy + 1;
        for (Eigen::Index ix = 0; ix < nx_; ++ix) {
            const Eigen::Index px = ix + 1;
            const Eigen::Index row = iy * nx_ + ix;
            const double kc = kappa(px, py);
            const double ax_p = s * (kappa(px + 1, py) + kc);
            const double ax_m = s * (kc + kappa(px - 1, py));
            const double ay_p = s * (kappa(px, py + 1) + kc);
            const double ay_m = s * (kc + kappa(px, py - 1));
            triplets.emplace_back(row, row, -(ax_p + ax_m + ay_p + ay_m) + omega_ * omega_);
            if (ix + 1 < nx_) triplets.emplace_back(row, row + 1, ax_p);
            if (ix > 0) triplets.emplace_back(row, row - 1, ax_m);
            if (iy + 1 < nx_) triplets.emplace_back(row, row + nx_, ay_p);
            if (iy > 0) triplets.emplace_back(row, row - nx_, ay_m);
        }
    }
    Eigen::SparseMatrix<double> helmholtz(n_, n_);
    helmholtz.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(helmholtz);
    if (lu.info() != Eigen::Success) {
        throw SingularSystem("WaveHoltzProblem2D: pilot Helmholtz solve failed");
    }
    const Eigen::VectorXd pilot = lu.solve(unit);
    forcing_ = (target_amplitude / pilot.cwiseAbs().maxCoeff()) * unit;
}

Eigen::VectorXd WaveHoltzProblem2D::apply_G(const Eigen::VectorXd& u) const {
    if (u.size() != n_) throw std::invalid_argument("WaveHoltzProblem2D: dimension mismatch");
    const double dt = stepper_.dt();
    const double scale = 2.0 / period_ * dt;

    Eigen::VectorXd wprev = stepper_.taylor_start(u, forcing_);
    Eigen::VectorXd wcur = u;
    Eigen::VectorXd acc = (0.5 * scale * filter_weight(0.0, omega_)) * u;
    for (int k = 0; k < nt_; ++k) {
        const double tk = k * dt;
        Eigen::VectorXd wnext = stepper_.step(wprev, wcur, forcing_, std::cos(omega_ * tk));
        const double tk1 = (k + 1) * dt;
        const double trap = (k + 1 == nt_) ? 0.5 : 1.0;
        acc += (trap * scale * filter_weight(tk1, omega_)) * wnext;
        wprev = std::move(wcur);
        wcur = std::move(wnext);
    }
    return acc;
}

}  // namespace hsaa
