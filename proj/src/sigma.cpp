#include "rshe/sigma.hpp"

#include <cmath>
#include <sstream>

#include "rshe/error.hpp"

namespace rshe {

SigmaSpec::SigmaSpec(Kind kind, std::vector<double> parameters)
    : kind_(kind), parameters_(std::move(parameters)) {
  if ((kind_ == Kind::Linear || kind_ == Kind::Sin || kind_ == Kind::Tanh) && parameters_.empty())
    parameters_.push_back(1.0);
  check_registration();
}

SigmaSpec SigmaSpec::parse(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  const std::string name = descriptor.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(descriptor.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        params.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("bad sigma parameter '" + item + "' in '" + descriptor + "'");
      }
    }
  }
  if (name == "linear") return SigmaSpec(Kind::Linear, params);
  if (name == "sin") return SigmaSpec(Kind::Sin, params);
  if (name == "tanh") return SigmaSpec(Kind::Tanh, params);
  if (name == "zero") return SigmaSpec(Kind::Zero, {});
  if (name == "additive") return SigmaSpec(Kind::Additive, {});
  throw ConfigError("unknown sigma '" + descriptor + "' (expected linear, sin, tanh, zero, additive)");
}

double SigmaSpec::operator()(double u) const noexcept {
  switch (kind_) {
    case Kind::Linear: return parameters_[0] * u;
    case Kind::Sin: return std::sin(parameters_[0] * u);
    case Kind::Tanh: return parameters_[0] * std::tanh(u);
    case Kind::Zero: return 0.0;
    case Kind::Additive: return 1.0;
  }
  return 0.0;
}

std::string SigmaSpec::id() const {
  switch (kind_) {
    case Kind::Linear: return "linear";
    case Kind::Sin: return "sin";
    case Kind::Tanh: return "tanh";
    case Kind::Zero: return "zero";
    case Kind::Additive: return "additive";
  }
  return "?";
}

std::string SigmaSpec::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  os << id();
  for (std::size_t i = 0; i < parameters_.size(); ++i) os << (i == 0 ? ':' : ',') << parameters_[i];
  return os.str();
}

double SigmaSpec::lipschitz_estimate() const {
  double lip = 0.0;
  constexpr int n = 4000;
  const double h = 20.0 / n;
  for (int i = 0; i < n; ++i) {
    const double a = -10.0 + i * h;
    lip = std::max(lip, std::abs((*this)(a + h) - (*this)(a)) / h);
  }
  return lip;
}

void SigmaSpec::check_registration() const {
  for (double p : parameters_)
    if (!std::isfinite(p)) throw ConfigError("sigma parameters must be finite");
  if (!additive() && std::abs((*this)(0.0)) >= 1e-14)
    throw ConfigError("sigma(0) must vanish for " + id());
  if (!std::isfinite(lipschitz_estimate())) throw ConfigError("sigma is not Lipschitz on [-10,10]");
}

}  // namespace rshe
