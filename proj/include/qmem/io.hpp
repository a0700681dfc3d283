#pragma once

#include "qmem/ensemble.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qmem {

// t_us, re_S12, im_S12, abs_S12, re_P13, im_P13, pop1, pop2, pop3, pop4
const std::vector<std::string>& trace_columns();

void write_trace_csv(std::ostream& os, const EnsembleTrace& trace);
void write_trace_csv(const std::string& path, const EnsembleTrace& trace);

std::vector<std::string> read_csv_header(const std::string& path);

// Plot styles: "spin" (|S| and Im S12), "photon" (Im P13), "populations".
std::vector<std::string> plot_styles();

// Self-contained gnuplot script for a trace CSV. Throws std::invalid_argument
// for an unknown style or when the header lacks a column the style plots.
std::string plot_script(const std::string& csv_path, const std::vector<std::string>& header,
                        const std::string& style);

}  // namespace qmem
