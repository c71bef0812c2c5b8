#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "stabcert/problem_model.hpp"

namespace stabcert {

/// Malformed or invalid input document. `line`/`column` are 1-based and 0
/// when the problem is not tied to a text position.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct InstanceDocument {
  QpInstance instance;
  std::optional<Vector> x_bar;
};

/// {"n", "D", "c", "A", "b", "alpha", "x_bar"} with row-major matrices.
InstanceDocument parse_instance(const std::string& text);

/// Snapshot document with keys x_bar, grad_f0, hess_xx_f0, F_value,
/// grad_x_F, hess_xx_F and either the three parameter blocks
/// (hess_wx_f0, grad_w_F, hess_wx_F) or "qp_structure": true.
DerivativeSnapshot parse_snapshot(const std::string& text);

/// Either kind of document, told apart by the presence of "grad_f0".
std::variant<InstanceDocument, DerivativeSnapshot> parse_document(const std::string& text);

/// Parameter direction with optional keys D, c, A, b, alpha; missing blocks are zero.
ParameterDelta parse_direction(const std::string& text, Eigen::Index n);

/// Reads a whole file; throws InputError when it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace stabcert
