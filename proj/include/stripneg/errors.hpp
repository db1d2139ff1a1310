#pragma once

#include <stdexcept>
#include <string>

namespace stripneg {

// Every failure raised by the library derives from Error. The category
// decides the CLI exit status: configuration problems map to 1, numerical
// failures to 2.
class Error : public std::runtime_error {
 public:
  enum class Category { config, numerical };

  Error(Category category, std::string name, const std::string& what)
      : std::runtime_error(what), category_(category), name_(std::move(name)) {}

  Category category() const noexcept { return category_; }
  /// Class name of the original failure, e.g. "CounterDisagreement".
  const std::string& name() const noexcept { return name_; }

  /// Same category and name with `context` prefixed to the message.
  Error with_context(const std::string& context) const {
    return Error(category_, name_, context + ": " + what());
  }

 private:
  Category category_;
  std::string name_;
};

#define STRIPNEG_CONFIG_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what)                            \
        : Error(Category::config, #Name, #Name ": " + what) {}               \
  }

#define STRIPNEG_NUMERICAL_ERROR(Name)                                \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what)                            \
        : Error(Category::numerical, #Name, #Name ": " + what) {}            \
  }

STRIPNEG_CONFIG_ERROR(NegativeValue);
STRIPNEG_CONFIG_ERROR(EmptyGrid);
STRIPNEG_CONFIG_ERROR(UnknownFamily);
STRIPNEG_CONFIG_ERROR(InvalidParams);
STRIPNEG_CONFIG_ERROR(IntegerFlux);
STRIPNEG_CONFIG_ERROR(SingularitySetup);
STRIPNEG_CONFIG_ERROR(BracketInvalid);
STRIPNEG_CONFIG_ERROR(GridCap);
STRIPNEG_CONFIG_ERROR(ConfigError);

STRIPNEG_NUMERICAL_ERROR(QuadratureFailure);
STRIPNEG_NUMERICAL_ERROR(NonConvergence);
STRIPNEG_NUMERICAL_ERROR(FactorizationBreakdown);
STRIPNEG_NUMERICAL_ERROR(CounterDisagreement);

#undef STRIPNEG_CONFIG_ERROR
#undef STRIPNEG_NUMERICAL_ERROR

}  // namespace stripneg
