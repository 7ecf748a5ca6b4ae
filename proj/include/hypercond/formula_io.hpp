#pragma once
// Set-formula parsing and the line-oriented bba document format.
//
// Formula grammar (whitespace ignored, `&` binds tighter than `|`):
//   expr   := term ('|' term)*
//   term   := factor ('&' factor)*
//   factor := ATOM | '(' expr ')' | '0'
// ATOM is [A-Za-z_][A-Za-z0-9_]*; '0' denotes the empty element; the Unicode
// operators U+222A / U+2229 are accepted as aliases of '|' / '&'.
//
// Document format (UTF-8, one declaration per line, '#' starts a comment):
//   frame: A, B, C
//   model: free | shafer | hybrid
//   empty: A & B          (hybrid only, repeated, before any mass line)
//   <formula> : <decimal mass>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "belief_state.hpp"

namespace hypercond {

class SyntaxError : public ValidationError {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : ValidationError(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class UnknownAtomError : public ValidationError {
public:
    UnknownAtomError(std::string atom, std::size_t offset)
        : ValidationError("unknown atom '" + atom + "' at byte " + std::to_string(offset)),
          atom_(std::move(atom)),
          offset_(offset) {}
    const std::string& atom() const { return atom_; }
    std::size_t offset() const { return offset_; }

private:
    std::string atom_;
    std::size_t offset_;
};

namespace detail {

struct Token {
    enum Kind { atom, op_or, op_and, lparen, rparen, zero, end } kind;
    std::string text;
    std::size_t offset;   // byte offset into the formula text
};

inline std::vector<Token> lex_formula(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
    };
    auto is_head = [](char c) { return c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
    auto is_tail = [&](char c) { return is_head(c) || (c >= '0' && c <= '9'); };
    while (i < text.size()) {
        const char c = text[i];
        if (is_space(c)) {
            ++i;
        } else if (c == '|') {
            out.push_back({Token::op_or, "|", i});
            ++i;
        } else if (c == '&') {
            out.push_back({Token::op_and, "&", i});
            ++i;
        } else if (c == '(') {
            out.push_back({Token::lparen, "(", i});
            ++i;
        } else if (c == ')') {
            out.push_back({Token::rparen, ")", i});
            ++i;
        } else if (c == '0') {
            out.push_back({Token::zero, "0", i});
            ++i;
        } else if (text.compare(i, 3, "∪") == 0) {   // Unicode union sign
            out.push_back({Token::op_or, "|", i});
            i += 3;
        } else if (text.compare(i, 3, "∩") == 0) {   // Unicode intersection sign
            out.push_back({Token::op_and, "&", i});
            i += 3;
        } else if (is_head(c)) {
            std::size_t start = i;
            while (i < text.size() && is_tail(text[i]))
                ++i;
            out.push_back({Token::atom, std::string(text.substr(start, i - start)), start});
        } else {
            throw SyntaxError("unexpected character", i);
        }
    }
    out.push_back({Token::end, "", text.size()});
    return out;
}

class FormulaParser {
public:
    FormulaParser(SpacePtr space, std::string_view text)
        : space_(std::move(space)), tokens_(lex_formula(text)) {}

    Element parse() {
        Element result = parse_expr();
        if (peek().kind != Token::end)
            throw SyntaxError("unexpected '" + peek().text + "'", peek().offset);
        return result;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }

    Element parse_expr() {
        Element result = parse_term();
        while (peek().kind == Token::op_or) {
            advance();
            result = result | parse_term();
        }
        return result;
    }

    Element parse_term() {
        Element result = parse_factor();
        while (peek().kind == Token::op_and) {
            advance();
            result = result & parse_factor();
        }
        return result;
    }

    Element parse_factor() {
        const Token& token = advance();
        switch (token.kind) {
            case Token::atom: {
                const int index = space_->frame().index_of(token.text);
                if (index < 0)
                    throw UnknownAtomError(token.text, token.offset);
                return atom_element(space_, index);
            }
            case Token::zero:
                return empty_element(space_);
            case Token::lparen: {
                Element inner = parse_expr();
                if (peek().kind != Token::rparen)
                    throw SyntaxError("expected ')'", peek().offset);
                advance();
                return inner;
            }
            default:
                throw SyntaxError("expected atom, '(' or '0'", token.offset);
        }
    }

    SpacePtr space_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
    while (b < e && is_space(s[b]))
        ++b;
    while (e > b && is_space(s[e - 1]))
        --e;
    return std::string(s.substr(b, e - b));
}

inline std::string format_mass(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

// Constraint body: strictly ATOM ('&' ATOM)+ over declared atoms, at least 2
// distinct; returns the atom mask.
inline RegionMask parse_constraint(const Frame& frame, std::string_view body) {
    const std::vector<Token> tokens = lex_formula(body);
    bool well_formed = tokens.size() >= 4 && tokens.size() % 2 == 0;
    for (std::size_t i = 0; well_formed && i + 1 < tokens.size(); ++i) {
        const bool want_atom = i % 2 == 0;
        well_formed = tokens[i].kind == (want_atom ? Token::atom : Token::op_and);
    }
    if (!well_formed)
        throw ValidationError("constraint must be an intersection of at least 2 atoms");
    RegionMask mask = 0;
    for (std::size_t i = 0; i < tokens.size() - 1; i += 2) {
        const int atom = frame.index_of(tokens[i].text);
        if (atom < 0)
            throw ValidationError("unknown atom '" + tokens[i].text + "'");
        mask |= RegionMask{1} << atom;
    }
    if (popcount(mask) < 2)
        throw ValidationError("constraint must name at least 2 distinct atoms");
    return mask;
}

// The frame/model/empty header lines shared by dump_bba and report emitters.
inline std::string document_header(const Space& space) {
    std::string out = "frame: ";
    for (int i = 0; i < space.frame().size(); ++i) {
        if (i > 0)
            out += ", ";
        out += space.frame().atoms[static_cast<std::size_t>(i)];
    }
    out += "\nmodel: ";
    out += to_string(space.model().kind);
    out += '\n';
    if (space.model().kind == ModelKind::hybrid) {
        std::vector<std::pair<int, std::string>> terms;
        for (RegionMask c : space.model().constraints) {
            std::string text;
            for (int i = 0; i < space.frame().size(); ++i) {
                if ((c >> i) & 1) {
                    if (!text.empty())
                        text += " & ";
                    text += space.frame().atoms[static_cast<std::size_t>(i)];
                }
            }
            terms.emplace_back(popcount(c), std::move(text));
        }
        std::sort(terms.begin(), terms.end());
        for (const auto& term : terms)
            out += "empty: " + term.second + '\n';
    }
    return out;
}

}  // namespace detail

// Parse a formula into its canonical element under the space's model.
inline Element parse_formula(const SpacePtr& space, std::string_view text) {
    return detail::FormulaParser(space, text).parse();
}

// One mass declaration as written, with its source line for diagnostics.
struct MassLine {
    std::string formula;
    double mass;
    int line;
};

// Syntactic layer of a bba document: header data plus the ordered mass lines,
// before any canonicalization against the model.
struct BbaDocument {
    Frame frame;
    Model model;
    std::vector<MassLine> masses;
};

inline BbaDocument parse_bba_document(std::string_view text) {
    struct Line {
        std::string content;
        int number;
    };
    std::vector<Line> lines;
    std::size_t pos = 0;
    int number = 0;
    while (pos <= text.size()) {
        const std::size_t newline = text.find('\n', pos);
        const std::size_t end = newline == std::string_view::npos ? text.size() : newline;
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        if (const std::size_t hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        std::string content = detail::trim(raw);
        if (!content.empty())
            lines.push_back({std::move(content), number});
        if (newline == std::string_view::npos)
            break;
        pos = newline + 1;
    }

    auto fail = [](int line, const std::string& message) -> void {
        throw ValidationError("line " + std::to_string(line) + ": " + message);
    };
    auto starts_with = [](const std::string& s, std::string_view prefix) {
        return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
    };

    std::size_t index = 0;
    if (index >= lines.size() || !starts_with(lines[index].content, "frame:"))
        throw ValidationError("line " + std::to_string(index < lines.size() ? lines[index].number : 1) +
                              ": expected 'frame:' declaration");
    BbaDocument doc;
    {
        const Line& line = lines[index];
        std::vector<std::string> names;
        std::string_view rest = std::string_view(line.content).substr(6);
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = rest.find(',', start);
            names.push_back(detail::trim(rest.substr(start, comma - start)));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        try {
            doc.frame = Frame::make(std::move(names));
        } catch (const ValidationError& e) {
            fail(line.number, e.what());
        }
        ++index;
    }

    if (index >= lines.size() || !starts_with(lines[index].content, "model:"))
        throw ValidationError("line " +
                              std::to_string(index < lines.size() ? lines[index].number : lines.back().number) +
                              ": expected 'model:' declaration");
    {
        const Line& line = lines[index];
        const std::string value = detail::trim(std::string_view(line.content).substr(6));
        if (value == "free")
            doc.model = Model::make_free();
        else if (value == "shafer")
            doc.model = Model::make_shafer();
        else if (value == "hybrid")
            doc.model = Model::make_hybrid({});
        else
            fail(line.number, "unknown model '" + value + "'");
        ++index;
    }

    std::vector<RegionMask> constraints;
    while (index < lines.size() && starts_with(lines[index].content, "empty:")) {
        const Line& line = lines[index];
        if (doc.model.kind != ModelKind::hybrid)
            fail(line.number, "empty: constraint requires a hybrid model");
        const std::string body = detail::trim(std::string_view(line.content).substr(6));
        try {
            constraints.push_back(detail::parse_constraint(doc.frame, body));
        } catch (const ValidationError& e) {
            fail(line.number, e.what());
        }
        ++index;
    }
    if (doc.model.kind == ModelKind::hybrid)
        doc.model = Model::make_hybrid(std::move(constraints));

    for (; index < lines.size(); ++index) {
        const Line& line = lines[index];
        if (starts_with(line.content, "empty:")) {
            if (doc.model.kind == ModelKind::hybrid)
                fail(line.number, "empty: constraint must precede all mass lines");
            fail(line.number, "empty: constraint requires a hybrid model");
        }
        const std::size_t colon = line.content.rfind(':');
        if (colon == std::string::npos)
            fail(line.number, "expected '<formula> : <mass>'");
        const std::string formula = detail::trim(std::string_view(line.content).substr(0, colon));
        const std::string value_text = detail::trim(std::string_view(line.content).substr(colon + 1));
        if (formula.empty())
            fail(line.number, "missing formula before ':'");
        if (value_text.empty())
            fail(line.number, "missing mass after ':'");
        char* parse_end = nullptr;
        const double value = std::strtod(value_text.c_str(), &parse_end);
        if (parse_end != value_text.c_str() + value_text.size() || !std::isfinite(value))
            fail(line.number, "invalid mass '" + value_text + "'");
        if (value < 0.0)
            fail(line.number, "negative mass");
        if (value > 1.0)
            fail(line.number, "mass exceeds 1");
        doc.masses.push_back({formula, value, line.number});
    }
    if (doc.masses.empty())
        throw ValidationError("document contains no mass lines");
    return doc;
}

struct LoadedBba {
    SpacePtr space;
    Bba bba;
};

// Parse, bind to the model, and validate a bba document. Mass totals within
// mass_sum_tolerance of 1 are silently renormalized; anything worse fails.
inline LoadedBba load_bba(std::string_view text) {
    const BbaDocument doc = parse_bba_document(text);
    SpacePtr space = Space::make(doc.frame, doc.model);
    std::map<RegionSet, double> masses;
    std::map<RegionSet, int> declared_on;
    double total = 0.0;
    for (const MassLine& entry : doc.masses) {
        Element element = empty_element(space);
        try {
            element = parse_formula(space, entry.formula);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(entry.line) + ": " + e.what());
        }
        if (element.is_empty() && entry.mass > 0.0)
            throw ValidationError("line " + std::to_string(entry.line) +
                                  ": positive mass on an element that is empty under the model");
        if (const auto it = declared_on.find(element.regions()); it != declared_on.end())
            throw ValidationError("line " + std::to_string(entry.line) + ": focal element '" +
                                  to_formula(element) + "' already declared on line " +
                                  std::to_string(it->second));
        declared_on[element.regions()] = entry.line;
        masses[element.regions()] = entry.mass;
        total += entry.mass;
    }
    if (std::abs(total - 1.0) > mass_sum_tolerance)
        throw ValidationError("mass lines sum to " + detail::format_mass(total) + ", expected 1");
    Bba bba = Bba::from_masses(space, masses);
    return LoadedBba{std::move(space), std::move(bba)};
}

// Deterministic serialization: header, sorted constraints, focal elements in
// canonical order with 12 significant digits. load(dump(x)) restores the same
// focal set with masses equal within 1e-12.
inline std::string dump_bba(const Bba& bba) {
    std::string out = detail::document_header(*bba.space());
    for (const auto& [element, value] : bba.entries())
        out += to_formula(element) + " : " + detail::format_mass(value) + '\n';
    return out;
}

}  // namespace hypercond
