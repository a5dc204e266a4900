#pragma once

namespace kac {

struct MeanFieldPoint {
  double beta = 0.0;
  double m_beta = 0.0;
};

// Non-negative root of m = tanh(beta m); 0 for beta <= 1.
double solve_m_beta(double beta);
MeanFieldPoint mean_field_point(double beta);

// S(m) for m in (-1,1); with closure = true, S(+-1) = 0 is accepted.
double entropy(double m, bool closure = false);
// f(m) = -m^2/2 - S(m)/beta.
double f_beta(double beta, double m, bool closure = false);
// f'(m) = -m + atanh(m)/beta.
double f_beta_prime(double beta, double m);

// beta with beta m_beta^2 = b.
double beta_tilde(double b);
double beta_bar(double lambda, double b_bar = 7.5);
double dobrushin_lower(double gamma, double lambda);

// Smallest integer varpi with varpi m_beta^2 > 10.
int default_varpi(double beta);

}  // namespace kac
