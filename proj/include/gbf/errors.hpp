#pragma once

#include <stdexcept>
#include <string>

namespace gbf {

enum class errc {
  constant_column,
  non_finite,
  degenerate_response,
  rank_deficient,
  saturated_fit,
  invalid_model,
  bad_hyper,
  no_residual_df,
  aicc_undefined,
  too_many_predictors,
  mixed_criteria,
  abort_empty,
  quadrature_nonconverged,
  bad_input,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace gbf
