#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cview {

// Base of every error raised by the library. Callers that only care about
// "something went wrong" catch this; tests pin the concrete type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CVIEW_DEFINE_ERROR(Name)        \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

CVIEW_DEFINE_ERROR(DuplicateObject);
CVIEW_DEFINE_ERROR(NoSuchObject);
CVIEW_DEFINE_ERROR(IncompleteContext);
CVIEW_DEFINE_ERROR(ScaleDomainViolation);
CVIEW_DEFINE_ERROR(UnknownAttribute);
CVIEW_DEFINE_ERROR(InvalidDomain);
CVIEW_DEFINE_ERROR(SchemaMismatch);
CVIEW_DEFINE_ERROR(ParseError);
CVIEW_DEFINE_ERROR(NotClosed);
CVIEW_DEFINE_ERROR(EmptyTraining);
CVIEW_DEFINE_ERROR(InvalidTree);
CVIEW_DEFINE_ERROR(EmptyForest);
CVIEW_DEFINE_ERROR(Unclassifiable);
CVIEW_DEFINE_ERROR(TooManyClusters);
CVIEW_DEFINE_ERROR(Undefined);
CVIEW_DEFINE_ERROR(MissingLabel);
CVIEW_DEFINE_ERROR(InvalidGrades);
CVIEW_DEFINE_ERROR(NoSuchTarget);
CVIEW_DEFINE_ERROR(InvalidArgument);

#undef CVIEW_DEFINE_ERROR

class DomainViolation : public Error {
 public:
  DomainViolation(std::size_t row, std::string column, std::string token)
      : Error("value '" + token + "' in row " + std::to_string(row) + ", column '" + column +
              "' is not in the declared domain"),
        row_(row),
        column_(std::move(column)),
        token_(std::move(token)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }
  const std::string& token() const noexcept { return token_; }

 private:
  std::size_t row_;
  std::string column_;
  std::string token_;
};

class CapacityExceeded : public Error {
 public:
  CapacityExceeded(std::size_t measured, std::size_t limit)
      : Error("attribute count " + std::to_string(measured) + " exceeds limit " + std::to_string(limit)),
        measured_(measured),
        limit_(limit) {}

  std::size_t measured() const noexcept { return measured_; }
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t measured_;
  std::size_t limit_;
};

class MissingValueAtNode : public Error {
 public:
  MissingValueAtNode(std::size_t node, const std::string& attribute)
      : Error("missing value for '" + attribute + "' at node n" + std::to_string(node)), node_(node), attribute_(attribute) {}
  std::size_t node() const noexcept { return node_; }
  const std::string& attribute() const noexcept { return attribute_; }

 private:
  std::size_t node_;
  std::string attribute_;
};

class MissingValue : public Error {
 public:
  explicit MissingValue(std::string attribute)
      : Error("missing value for attribute '" + attribute + "'"), attribute_(std::move(attribute)) {}
  const std::string& attribute() const noexcept { return attribute_; }

 private:
  std::string attribute_;
};

}  // namespace cview
