#pragma once

#include <stdexcept>
#include <string>

namespace commlab::script {

/// 1-based line/column of a token in the submitted source.
struct SourcePos {
    int line = 0;
    int column = 0;

    bool known() const { return line > 0; }
    std::string str() const;

    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

/// Raised by the lexer and parser. The message does not repeat the position.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& what, SourcePos pos)
        : std::runtime_error(what), pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

/// A fault in the user's program: undefined name, bad index, shape mismatch...
class ScriptError : public std::runtime_error {
public:
    explicit ScriptError(const std::string& what, SourcePos pos = {})
        : std::runtime_error(what), pos_(pos) {}
    SourcePos pos() const { return pos_; }
    void set_pos_if_unknown(SourcePos p) {
        if (!pos_.known()) pos_ = p;
    }

private:
    SourcePos pos_;
};

/// A sandbox cap (steps, vector length, figures, output) was hit.
class ResourceExceeded : public std::runtime_error {
public:
    explicit ResourceExceeded(const std::string& what, SourcePos pos = {})
        : std::runtime_error(what), pos_(pos) {}
    SourcePos pos() const { return pos_; }
    void set_pos_if_unknown(SourcePos p) {
        if (!pos_.known()) pos_ = p;
    }

private:
    SourcePos pos_;
};

}  // namespace commlab::script
