#pragma once

#include <string>
#include <vector>

namespace rshe {

/// Diffusion coefficient sigma(u) from a small registry:
///   linear:a   -> a*u
///   sin:a      -> sin(a*u)
///   tanh:a     -> a*tanh(u)
///   zero       -> 0
///   additive   -> 1   (linear-equation validation only; exempt from sigma(0)=0)
class SigmaSpec {
 public:
  enum class Kind { Linear, Sin, Tanh, Zero, Additive };

  SigmaSpec() = default;
  SigmaSpec(Kind kind, std::vector<double> parameters);

  /// Parses "id[:p1[,p2...]]" and runs the registration checks.
  static SigmaSpec parse(const std::string& descriptor);

  double operator()(double u) const noexcept;

  Kind kind() const noexcept { return kind_; }
  bool additive() const noexcept { return kind_ == Kind::Additive; }
  const std::vector<double>& parameters() const noexcept { return parameters_; }
  std::string id() const;
  std::string descriptor() const;

  /// Largest difference quotient over a grid on [-10, 10].
  double lipschitz_estimate() const;

 private:
  void check_registration() const;

  Kind kind_ = Kind::Linear;
  std::vector<double> parameters_{1.0};
};

}  // namespace rshe
