#include "qmem/seqdsl.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

namespace qmem {

ParseError::ParseError(int line, int column, std::string message, std::string token)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message +
                         (token.empty() ? "" : " (at '" + token + "')")),
      line(line), column(column), message(std::move(message)), token(std::move(token))
{
}

namespace {

enum class Tok { ident, number, punct, end };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
    double value = 0.0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        int last_line = 1, last_col = 1;
        while (true) {
            skip_space_and_comments();
            if (pos_ >= src_.size()) break;
            const int line = line_, col = col_;
            last_line = line;
            last_col = col;
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t b = pos_;
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    advance();
                out.push_back({Tok::ident, std::string(src_.substr(b, pos_ - b)), line, col});
            } else if (starts_number()) {
                out.push_back(number(line, col));
            } else if (std::string_view("(),;=").find(c) != std::string_view::npos) {
                advance();
                out.push_back({Tok::punct, std::string(1, c), line, col});
            } else {
                throw ParseError(line, col, "unexpected character", std::string(1, c));
            }
            last_col = col_ > 1 ? col_ - 1 : col_;
            last_line = line_;
        }
        // End-of-input errors point at the last character of the source.
        out.push_back({Tok::end, "", last_line, last_col});
        return out;
    }

private:
    void advance()
    {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space_and_comments()
    {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool digit_at(std::size_t i) const
    {
        return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
    }

    bool starts_number() const
    {
        std::size_t i = pos_;
        if (src_[i] == '-' || src_[i] == '+') ++i;
        if (digit_at(i)) return true;
        return i < src_.size() && src_[i] == '.' && digit_at(i + 1);
    }

    Token number(int line, int col)
    {
        const std::size_t b = pos_;
        if (src_[pos_] == '-' || src_[pos_] == '+') advance();
        while (digit_at(pos_)) advance();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            advance();
            while (digit_at(pos_)) advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t i = pos_ + 1;
            if (i < src_.size() && (src_[i] == '-' || src_[i] == '+')) ++i;
            if (digit_at(i)) {
                while (pos_ < i) advance();
                while (digit_at(pos_)) advance();
            }
        }
        std::string text(src_.substr(b, pos_ - b));
        const char* first = text.data() + (text[0] == '+' ? 1 : 0);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw ParseError(line, col, "malformed number", text);
        return {Tok::number, text, line, col, v};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    PulseSequence run()
    {
        PulseSequence seq;
        while (peek().kind != Tok::end) statement(seq);
        return seq;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const
    {
        throw ParseError(t.line, t.column, msg, t.kind == Tok::end ? "<end of input>" : t.text);
    }

    bool is(const Token& t, std::string_view text) const
    {
        return (t.kind == Tok::ident || t.kind == Tok::punct) && t.text == text;
    }

    const Token& expect(std::string_view text)
    {
        if (!is(peek(), text)) fail(peek(), "expected '" + std::string(text) + "'");
        return take();
    }

    std::string ident(const std::string& what)
    {
        if (peek().kind != Tok::ident) fail(peek(), "expected " + what);
        return take().text;
    }

    double number(const std::string& what, bool allow_negative)
    {
        const Token& t = peek();
        if (t.kind != Tok::number) fail(t, "expected " + what);
        if (!allow_negative && t.value < 0.0) fail(t, what + " must not be negative");
        return take().value;
    }

    int integer(const std::string& what)
    {
        const Token& t = peek();
        const double v = number(what, false);
        if (v != static_cast<int>(v)) fail(t, what + " must be an integer");
        return static_cast<int>(v);
    }

    double time_value()
    {
        const Token& nt = peek();
        const double v = number("a duration", false);
        if (!(v > 0.0)) fail(nt, "duration must be positive");
        const Token& u = peek();
        if (is(u, "us")) {
            take();
            return v;
        }
        if (is(u, "ms")) {
            take();
            return v * 1000.0;
        }
        fail(u, "expected time unit 'us' or 'ms'");
    }

    DecayOverride override_clause()
    {
        expect("gamma");
        expect("(");
        DecayOverride ov;
        ov.i = integer("a level index");
        expect(",");
        ov.j = integer("a level index");
        expect(")");
        expect("=");
        ov.gamma_khz = number("a dephasing width", false);
        expect("kHz");
        return ov;
    }

    void with_item(PulseSegment& seg)
    {
        if (is(peek(), "frozen_shift")) {
            if (seg.frozen_shift) fail(peek(), "frozen_shift given twice");
            take();
            seg.frozen_shift = true;
            return;
        }
        seg.overrides.push_back(override_clause());
    }

    void with_clause(PulseSegment& seg)
    {
        if (!is(peek(), "with")) return;
        take();
        with_item(seg);
        while (is(peek(), ",")) {
            take();
            with_item(seg);
        }
    }

    void field_spec(PulseSegment& seg)
    {
        const Token& name_tok = peek();
        if (name_tok.kind != Tok::ident) fail(name_tok, "expected a field name");
        const auto field = field_from_name(name_tok.text);
        if (!field) fail(name_tok, "unknown field '" + name_tok.text + "'");
        take();
        auto& slot = seg.fields[static_cast<int>(*field)];
        if (slot) fail(name_tok, "field '" + name_tok.text + "' given twice");

        expect("(");
        FieldDrive d;
        bool have_amp = false, have_det = false, have_phase = false;
        while (!is(peek(), ")")) {
            if (have_amp || have_det || have_phase) expect(",");
            const Token& key = peek();
            const std::string k = ident("a field parameter");
            expect("=");
            if (k == "amp" && !have_amp) {
                d.amp_khz = number("an amplitude", false);
                expect("kHz");
                have_amp = true;
            } else if (k == "det" && !have_det) {
                d.det_khz = number("a detuning", true);
                expect("kHz");
                have_det = true;
            } else if (k == "phase" && !have_phase) {
                d.phase_deg = number("a phase", true);
                expect("deg");
                have_phase = true;
            } else {
                fail(key, "unknown or repeated field parameter '" + k + "'");
            }
        }
        if (!have_amp) fail(peek(), "missing key 'amp' in field '" + name_tok.text + "'");
        take();
        slot = d;
    }

    void statement(PulseSequence& seq)
    {
        const Token& kw = peek();
        if (kw.kind != Tok::ident) fail(kw, "expected a statement");
        const std::string k = kw.text;
        take();
        if (k == "init") {
            std::vector<double> p;
            while (peek().kind == Tok::number) {
                if (p.size() == 4) fail(peek(), "init takes at most four populations");
                p.push_back(number("a population", false));
            }
            if (p.size() < 2) fail(peek(), "init takes two to four populations");
            seq.initial_populations = std::move(p);
        } else if (k == "pulse") {
            PulseSegment seg;
            field_spec(seg);
            while (is(peek(), ",")) {
                take();
                field_spec(seg);
            }
            const Token& mode = peek();
            if (is(mode, "dur")) {
                take();
                seg.duration_us = time_value();
            } else if (is(mode, "area")) {
                take();
                const Token& nt = peek();
                const double a = number("an area", false);
                if (!(a > 0.0)) fail(nt, "area must be positive");
                expect("pi");
                if (!(generalized_rabi_khz(seg) > 0.0)) fail(mode, "area given but no active field");
                seg.area_pi = a;
            } else {
                fail(mode, "expected 'dur' or 'area'");
            }
            with_clause(seg);
            seq.items.emplace_back(std::move(seg));
        } else if (k == "wait") {
            PulseSegment seg;
            seg.duration_us = time_value();
            with_clause(seg);
            seq.items.emplace_back(std::move(seg));
        } else if (k == "set") {
            seq.items.emplace_back(SetDecay{override_clause()});
        } else if (k == "mark") {
            seq.items.emplace_back(Mark{ident("a marker name")});
        } else {
            fail(kw, "unknown statement '" + k + "'");
        }
        expect(";");
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

}  // namespace

PulseSequence parse_sequence(std::string_view source)
{
    return Parser(Lexer(source).run()).run();
}

PulseSequence load_sequence(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sequence file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sequence(ss.str());
}

std::string format_number(double v)
{
    if (v == 0.0) return "0";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::string format_override(const DecayOverride& ov)
{
    return "gamma(" + std::to_string(ov.i) + "," + std::to_string(ov.j) + ")=" + format_number(ov.gamma_khz) + "kHz";
}

std::string format_with(const PulseSegment& seg)
{
    std::string s;
    for (std::size_t k = 0; k < seg.overrides.size(); ++k)
        s += (k == 0 ? " with " : ", ") + format_override(seg.overrides[k]);
    if (seg.frozen_shift) s += seg.overrides.empty() ? " with frozen_shift" : ", frozen_shift";
    return s;
}

}  // namespace

std::string format_sequence(const PulseSequence& seq)
{
    std::ostringstream os;
    os << "# qmem pulse sequence\n";
    if (!seq.initial_populations.empty()) {
        os << "init";
        for (double p : seq.initial_populations) os << ' ' << format_number(p);
        os << ";\n";
    }
    for (const auto& item : seq.items) {
        if (const auto* m = std::get_if<Mark>(&item)) {
            os << "mark " << m->name << ";\n";
        } else if (const auto* sd = std::get_if<SetDecay>(&item)) {
            os << "set " << format_override(sd->value) << ";\n";
        } else {
            const auto& s = std::get<PulseSegment>(item);
            if (s.is_wait()) {
                os << "wait " << format_number(s.duration_us.value_or(0.0)) << " us";
            } else {
                os << "pulse";
                bool first = true;
                for (int f = 0; f < kFieldCount; ++f) {
                    if (!s.fields[f]) continue;
                    const auto& d = *s.fields[f];
                    os << (first ? " " : ", ") << field_name(static_cast<Field>(f)) << "(amp="
                       << format_number(d.amp_khz) << "kHz";
                    if (d.det_khz != 0.0) os << ", det=" << format_number(d.det_khz) << "kHz";
                    if (d.phase_deg != 0.0) os << ", phase=" << format_number(d.phase_deg) << "deg";
                    os << ')';
                    first = false;
                }
                if (s.duration_us)
                    os << " dur " << format_number(*s.duration_us) << " us";
                else
                    os << " area " << format_number(s.area_pi.value_or(0.0)) << " pi";
            }
            os << format_with(s) << ";\n";
        }
    }
    return os.str();
}

}  // namespace qmem
