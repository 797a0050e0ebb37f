#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bhd {

struct SimplexOptions {
    int max_evaluations = 20000;
    // Stop when the relative spread of objective values across the simplex drops below this.
    double f_rel_tol = 1e-10;
    double x_rel_tol = 1e-12;
    // Initial simplex edge per coordinate, relative to |x0| (absolute when x0 = 0).
    double initial_step = 0.05;
};

struct SimplexResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// Nelder-Mead downhill simplex minimization.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                          const SimplexOptions& opt = {});

struct LorentzianFit {
    double center = 0.0;
    double fwhm = 0.0;
    double peak = 0.0;
    double baseline = 0.0;
    // Root-mean-square residual over all points.
    double residual = 0.0;

    double operator()(double x) const;
};

// Least-squares fit of y = baseline + peak / (1 + 4 (x - center)^2 / fwhm^2)
// by damped Gauss-Newton from a max/half-max scan. A flat input yields
// peak ~ 0 rather than an error. Throws FitDiverged when the residual cannot
// be reduced below the starting point's or fewer than 5 points are given.
LorentzianFit fit_lorentzian(const std::vector<std::pair<double, double>>& xy);

}  // namespace bhd
