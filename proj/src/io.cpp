#include "qmem/io.hpp"

#include "qmem/seqdsl.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmem {

const std::vector<std::string>& trace_columns()
{
    static const std::vector<std::string> cols = {"t_us",   "re_S12", "im_S12", "abs_S12", "re_P13",
                                                  "im_P13", "pop1",   "pop2",   "pop3",    "pop4"};
    return cols;
}

void write_trace_csv(std::ostream& os, const EnsembleTrace& trace)
{
    const auto& cols = trace_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
    os << '\n';
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const auto& p = trace.populations[i];
        os << format_number(trace.times[i]) << ',' << format_number(trace.S[i].real()) << ','
           << format_number(trace.S[i].imag()) << ',' << format_number(std::abs(trace.S[i])) << ','
           << format_number(trace.P[i].real()) << ',' << format_number(trace.P[i].imag());
        for (double v : p) os << ',' << format_number(v);
        os << '\n';
    }
}

void write_trace_csv(const std::string& path, const EnsembleTrace& trace)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_trace_csv(out, trace);
}

std::vector<std::string> read_csv_header(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    return cols;
}

std::vector<std::string> plot_styles()
{
    return {"spin", "photon", "populations"};
}

namespace {

struct Curve {
    std::string column;
    std::string title;
};

std::vector<Curve> curves_for(const std::string& style)
{
    if (style == "spin") return {{"abs_S12", "|S12|"}, {"im_S12", "Im S12"}};
    if (style == "photon") return {{"im_P13", "Im P13"}};
    if (style == "populations")
        return {{"pop1", "rho11"}, {"pop2", "rho22"}, {"pop3", "rho33"}, {"pop4", "rho44"}};
    throw std::invalid_argument("unknown plot style '" + style + "'");
}

}  // namespace

std::string plot_script(const std::string& csv_path, const std::vector<std::string>& header,
                        const std::string& style)
{
    const auto curves = curves_for(style);
    auto col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::invalid_argument("CSV has no column '" + name + "'");
        return static_cast<int>(it - header.begin()) + 1;
    };
    const int t = col("t_us");

    std::ostringstream os;
    os << "# gnuplot script; run with: gnuplot -p <this file>\n";
    os << "set datafile separator ','\n";
    os << "set key top right\n";
    os << "set xlabel 't (us)'\n";
    os << "set ylabel '" << (style == "populations" ? "population" : "coherence") << "'\n";
    os << "set title '" << style << "'\n";
    os << "plot ";
    for (std::size_t k = 0; k < curves.size(); ++k) {
        os << (k ? ", \\\n     " : "") << "'" << csv_path << "' every ::1 using " << t << ':' << col(curves[k].column)
           << " with lines title '" << curves[k].title << "'";
    }
    os << '\n';
    return os.str();
}

}  // namespace qmem
