#pragma once

#include <span>
#include <string>
#include <vector>

namespace earoxi::stats {

// Two measurements per subject, aligned by position.
struct PairedSamples {
  std::vector<std::string> labels;
  std::vector<double> a;
  std::vector<double> b;

  void validate() const;
};

// sqrt(mean((a-b)^2))
double rms_difference(const PairedSamples& p);

// mean(a-b); the report documents the a-minus-b sign convention.
double mean_difference(const PairedSamples& p);

enum class TTestMode { Paired, Welch };

struct TTestResult {
  double t = 0;
  double p = 1;
  double df = 0;
};

// Two-sided t test. Identical inputs degrade to t=0, p=1; a non-zero
// difference with zero variance is a ZeroVariance error.
TTestResult t_test(std::span<const double> x, std::span<const double> y, TTestMode mode);

struct PearsonResult {
  double r = 0;
  double p = 1;
};

// Sample correlation with p from t = r*sqrt((n-2)/(1-r^2)) on n-2 df.
PearsonResult pearson_r(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b) by Lentz continued fraction;
// precision target 1e-10 over the parameter ranges the t tests use.
double ibeta_reg(double a, double b, double x);

double student_t_cdf(double t, double df);
double student_t_two_sided_p(double t, double df);

}  // namespace earoxi::stats
