#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "inspectre/errors.hpp"

namespace inspectre::detail {

// Character cursor over a single source line.  `#` starts a comment.
class TextCursor {
public:
    TextCursor(std::string_view line, std::size_t line_no) : text_(line), line_(line_no) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return pos_ + 1; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size() || text_[pos_] == '#';
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    char peek_raw(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    bool accept(std::string_view tok) {
        skip_ws();
        if (text_.substr(pos_, tok.size()) != tok) return false;
        pos_ += tok.size();
        return true;
    }

    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
    }

    std::optional<std::string> ident() {
        skip_ws();
        if (pos_ >= text_.size()) return std::nullopt;
        char c = text_[pos_];
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) return std::nullopt;
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    std::optional<Word> number() {
        skip_ws();
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            return std::nullopt;
        }
        int base = 10;
        if (text_[pos_] == '0' && pos_ + 1 < text_.size() &&
            (text_[pos_ + 1] == 'x' || text_[pos_ + 1] == 'X')) {
            base = 16;
            pos_ += 2;
        }
        Word v = 0;
        std::size_t digits = 0;
        while (pos_ < text_.size()) {
            char c = static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_])));
            int d;
            if (c >= '0' && c <= '9') {
                d = c - '0';
            } else if (base == 16 && c >= 'a' && c <= 'f') {
                d = c - 'a' + 10;
            } else {
                break;
            }
            if (d >= base) break;
            v = v * static_cast<Word>(base) + static_cast<Word>(d);
            ++pos_;
            ++digits;
        }
        if (digits == 0) fail("malformed number");
        if (pos_ < text_.size() &&
            (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            fail("malformed number");
        }
        return v;
    }

    // Remaining text up to a comment, trimmed.
    std::string rest() {
        skip_ws();
        std::size_t end = text_.find('#', pos_);
        if (end == std::string_view::npos) end = text_.size();
        std::string out(text_.substr(pos_, end - pos_));
        while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
        pos_ = end;
        return out;
    }

    void expect_end() {
        if (!at_end()) fail("unexpected trailing text");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, pos_ + 1, what); }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

}  // namespace inspectre::detail
