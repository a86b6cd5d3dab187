#pragma once

#include <iosfwd>
#include <string>

#include "fvdae/study.hpp"

namespace fvdae {

inline constexpr const char* kResultsHeader =
    "case,interp,method,tableau,n_grid,steps,h,h_per_stage,err_u_l2,err_u_linf,err_ubar_l2,"
    "err_p_l2,err_p_linf,observed_order_field,observed_order_value";

// One row per (field, run), fields in study order and runs in input order.
void write_results_csv(std::ostream& out, const StudyResult& result);

// Log-log error curves (L2) against grid spacing or step size, with slope guides.
void write_svg(std::ostream& out, const StudyResult& result, const std::string& title);

// Human-readable table of errors and slopes.
void write_summary(std::ostream& out, const StudyResult& result);

}  // namespace fvdae
