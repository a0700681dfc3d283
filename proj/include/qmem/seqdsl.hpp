#pragma once

// Text format for pulse sequences (.qps):
//
//   # comment
//   init 0.5 0.5;
//   pulse probe(amp=17kHz), coupling(amp=17kHz) dur 3 us;
//   wait 27 us;
//   pulse probe(amp=35.355kHz, det=0kHz, phase=90deg), coupling(amp=35.355kHz) area 2 pi;
//   wait 1010 us with gamma(2,1)=0kHz, frozen_shift;
//   set gamma(2,1)=1kHz;
//   mark R_end;

#include "qmem/model.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmem {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, std::string message, std::string token);
    int line;
    int column;
    std::string message;
    std::string token;
};

// Throws ParseError on the first problem.
PulseSequence parse_sequence(std::string_view source);
PulseSequence load_sequence(const std::string& path);

// Canonical text; parse_sequence(format_sequence(s)) == s.
std::string format_sequence(const PulseSequence& seq);

// Shortest decimal that reads back to the same double.
std::string format_number(double v);

}  // namespace qmem
