#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <variant>
#include <vector>

#include "../error.hpp"

namespace jumpfb {

// Model strings look like `name(arg, arg, ...)` where each argument is a
// number, a bare identifier, or a bracketed number list `[a, b, c]`.
// Rows of a matrix are separated with ';' inside brackets: `[2, 0; 0, 1]`.
struct ModelArg {
    std::variant<double, std::string, std::vector<std::vector<double>>> value;

    bool is_number() const { return std::holds_alternative<double>(value); }
    bool is_word() const { return std::holds_alternative<std::string>(value); }
    bool is_list() const { return std::holds_alternative<std::vector<std::vector<double>>>(value); }

    double number() const {
        if (!is_number()) throw ConfigError("expected a number argument");
        return std::get<double>(value);
    }
    const std::string& word() const {
        if (!is_word()) throw ConfigError("expected an identifier argument");
        return std::get<std::string>(value);
    }
    // Flattened single-row list.
    std::vector<double> vector() const {
        if (!is_list()) throw ConfigError("expected a bracketed list argument");
        const auto& rows = std::get<std::vector<std::vector<double>>>(value);
        if (rows.size() != 1) throw ConfigError("expected a single-row list");
        return rows.front();
    }
    const std::vector<std::vector<double>>& rows() const {
        if (!is_list()) throw ConfigError("expected a bracketed list argument");
        return std::get<std::vector<std::vector<double>>>(value);
    }
};

struct ModelCall {
    std::string name;
    std::vector<ModelArg> args;
};

namespace detail {

class ModelLexer {
public:
    explicit ModelLexer(const std::string& s) : s_(s) {}

    ModelCall parse() {
        ModelCall call;
        call.name = identifier();
        skip();
        if (eof()) return call;
        expect('(');
        skip();
        if (peek() != ')') {
            for (;;) {
                call.args.push_back(argument());
                skip();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                break;
            }
        }
        expect(')');
        skip();
        if (!eof()) fail("trailing characters");
        return call;
    }

private:
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }
    void skip() {
        while (!eof() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("model string '" + s_ + "': " + why + " at offset " + std::to_string(pos_));
    }
    void expect(char c) {
        skip();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    std::string identifier() {
        skip();
        std::size_t b = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-'))
            ++pos_;
        if (b == pos_) fail("expected identifier");
        return s_.substr(b, pos_ - b);
    }
    double number() {
        skip();
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("expected number");
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }
    ModelArg argument() {
        skip();
        char c = peek();
        if (c == '[') {
            ++pos_;
            std::vector<std::vector<double>> rows(1);
            skip();
            if (peek() == ']') {
                ++pos_;
                return {rows};
            }
            for (;;) {
                rows.back().push_back(number());
                skip();
                if (peek() == ',') {
                    ++pos_;
                } else if (peek() == ';') {
                    ++pos_;
                    rows.emplace_back();
                } else {
                    break;
                }
            }
            expect(']');
            return {rows};
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return {identifier()};
        return {number()};
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline ModelCall parse_model_call(const std::string& text) {
    return detail::ModelLexer(text).parse();
}

} // namespace jumpfb
