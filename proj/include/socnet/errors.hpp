#pragma once

#include <stdexcept>
#include <string>

namespace socnet {

// Error taxonomy used across the toolkit. The CLI maps these onto exit
// codes: ParseError/ValidationError/LookupError/ConfigError -> validation
// failure, everything else -> runtime failure.

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LookupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised by balanced_accuracy when the label set contains a single class.
// Carries the recall of the class that is present so callers can still
// report something meaningful about the degenerate test set.
struct DegenerateClassError : std::runtime_error {
  double present_class_recall;
  int present_class;

  DegenerateClassError(const std::string& msg, double recall, int cls)
      : std::runtime_error(msg), present_class_recall(recall), present_class(cls) {}
};

}  // namespace socnet
