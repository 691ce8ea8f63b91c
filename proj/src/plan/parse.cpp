#include "planloop/plan/parse.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace planloop::plan {

namespace {

constexpr int kIndentUnit = 4;

const std::set<std::string> kKeywords = {
    "def",  "assert", "report", "for", "in",   "if",    "else", "break",
    "True", "False",  "None",   "and", "or",   "not",
};

struct LineRec {
    int number = 0;
    int indent = 0;
    std::string text; // indent stripped, trailing whitespace stripped
};

// Thrown internally, converted to the Result error at the top.
struct ParseAbort {
    ParseError error;
};

[[noreturn]] void fail(int line, int column, std::string message) {
    throw ParseAbort{ParseError{line, column, std::move(message)}};
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Single-line token cursor. Columns are 1-based over the full source line.
class Cursor {
public:
    explicit Cursor(const LineRec& line) : line_(line) {}

    int line_number() const { return line_.number; }
    int column() const { return line_.indent + static_cast<int>(pos_) + 1; }

    void skip_spaces() {
        while (pos_ < line_.text.size() && line_.text[pos_] == ' ') ++pos_;
    }

    bool at_end() {
        skip_spaces();
        return pos_ >= line_.text.size();
    }

    char peek_char() {
        skip_spaces();
        return pos_ < line_.text.size() ? line_.text[pos_] : '\0';
    }

    // Next identifier-or-keyword without consuming it; empty if none.
    std::string peek_word() {
        skip_spaces();
        if (pos_ >= line_.text.size() || !is_ident_start(line_.text[pos_])) return {};
        std::size_t end = pos_;
        while (end < line_.text.size() && is_ident_char(line_.text[end])) ++end;
        return line_.text.substr(pos_, end - pos_);
    }

    std::string take_word() {
        std::string word = peek_word();
        pos_ += word.size();
        return word;
    }

    bool match_word(const std::string& word) {
        if (peek_word() != word) return false;
        pos_ += word.size();
        return true;
    }

    bool match_symbol(const std::string& sym) {
        skip_spaces();
        if (line_.text.compare(pos_, sym.size(), sym) != 0) return false;
        // '=' must not swallow the first half of '=='
        if (sym == "=" && pos_ + 1 < line_.text.size() && line_.text[pos_ + 1] == '=')
            return false;
        pos_ += sym.size();
        return true;
    }

    void expect_symbol(const std::string& sym) {
        if (!match_symbol(sym)) fail(line_.number, column(), "expected '" + sym + "'");
    }

    std::string expect_name(const std::string& what) {
        skip_spaces();
        std::string word = peek_word();
        if (word.empty()) fail(line_.number, column(), "expected " + what);
        if (kKeywords.count(word))
            fail(line_.number, column(), "'" + word + "' is a keyword, expected " + what);
        pos_ += word.size();
        return word;
    }

    void expect_end(const std::string& context) {
        if (!at_end()) {
            if (line_.text[pos_] == '#')
                fail(line_.number, column(), "trailing comment after " + context);
            fail(line_.number, column(), "unexpected text after " + context);
        }
    }

    // Raw remainder of the line (spaces already skipped).
    std::string rest() {
        skip_spaces();
        return line_.text.substr(pos_);
    }

    std::int64_t expect_int() {
        skip_spaces();
        std::size_t start = pos_;
        while (pos_ < line_.text.size() && std::isdigit(static_cast<unsigned char>(line_.text[pos_])))
            ++pos_;
        if (pos_ == start) fail(line_.number, column(), "expected an integer");
        return std::stoll(line_.text.substr(start, pos_ - start));
    }

    // Body of a quoted string, opening quote already consumed.
    std::string take_string_body() {
        std::string out;
        while (pos_ < line_.text.size() && line_.text[pos_] != '\'')
            out.push_back(line_.text[pos_++]);
        if (pos_ >= line_.text.size()) fail(line_.number, column(), "unterminated string literal");
        ++pos_; // closing quote
        return out;
    }

    void advance(std::size_t n) { pos_ += n; }
    char raw_char() const { return pos_ < line_.text.size() ? line_.text[pos_] : '\0'; }

private:
    const LineRec& line_;
    std::size_t pos_ = 0;
};

// --- expressions -----------------------------------------------------------

Expr parse_or(Cursor& cur);

Value parse_scalar_literal(Cursor& cur) {
    cur.skip_spaces();
    char c = cur.peek_char();
    if (c == '\'') {
        cur.advance(1);
        return Value{cur.take_string_body()};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Value{cur.expect_int()};
    std::string word = cur.peek_word();
    if (word == "True") { cur.take_word(); return Value{true}; }
    if (word == "False") { cur.take_word(); return Value{false}; }
    if (word == "None") { cur.take_word(); return Value{}; }
    fail(cur.line_number(), cur.column(), "expected a literal");
}

Expr parse_interpolation(Cursor& cur) {
    // f' already detected; cursor sits on "f".
    cur.advance(2); // f'
    Interpolate interp;
    std::string chunk;
    while (true) {
        char c = cur.raw_char();
        if (c == '\0') fail(cur.line_number(), cur.column(), "unterminated f-string");
        if (c == '\'') {
            cur.advance(1);
            break;
        }
        if (c == '{') {
            cur.advance(1);
            std::string name;
            while (is_ident_char(cur.raw_char())) {
                name.push_back(cur.raw_char());
                cur.advance(1);
            }
            if (name.empty() || cur.raw_char() != '}')
                fail(cur.line_number(), cur.column(), "f-string braces may hold only a variable name");
            cur.advance(1);
            interp.chunks.push_back(chunk);
            interp.vars.push_back(name);
            chunk.clear();
            continue;
        }
        if (c == '}') fail(cur.line_number(), cur.column(), "unmatched '}' in f-string");
        chunk.push_back(c);
        cur.advance(1);
    }
    interp.chunks.push_back(chunk);
    return Expr{std::move(interp)};
}

Expr parse_primary(Cursor& cur) {
    cur.skip_spaces();
    char c = cur.peek_char();
    if (c == '(') {
        cur.advance(1);
        Expr inner = parse_or(cur);
        cur.expect_symbol(")");
        return inner;
    }
    if (c == '[') {
        cur.advance(1);
        Value::List items;
        if (cur.peek_char() != ']') {
            while (true) {
                items.push_back(parse_scalar_literal(cur));
                if (cur.match_symbol(",")) continue;
                break;
            }
        }
        cur.expect_symbol("]");
        return make_literal(Value{std::move(items)});
    }
    if (c == 'f' && cur.rest().size() >= 2 && cur.rest()[1] == '\'') return parse_interpolation(cur);
    if (c == '\'' || std::isdigit(static_cast<unsigned char>(c)))
        return make_literal(parse_scalar_literal(cur));

    std::string word = cur.peek_word();
    if (word.empty()) fail(cur.line_number(), cur.column(), "expected an expression");
    if (word == "True" || word == "False" || word == "None")
        return make_literal(parse_scalar_literal(cur));
    if (kKeywords.count(word))
        fail(cur.line_number(), cur.column(), "unexpected keyword '" + word + "' in expression");
    cur.take_word();
    return make_var(word);
}

Expr parse_comparison(Cursor& cur) {
    Expr lhs = parse_primary(cur);
    std::optional<CompareOp> op;
    if (cur.match_symbol("==")) op = CompareOp::Eq;
    else if (cur.match_symbol("!=")) op = CompareOp::Ne;
    else if (cur.peek_word() == "in") { cur.take_word(); op = CompareOp::In; }
    else if (cur.peek_word() == "not") {
        cur.take_word();
        if (!cur.match_word("in"))
            fail(cur.line_number(), cur.column(), "expected 'in' after 'not'");
        op = CompareOp::NotIn;
    }
    if (!op) return lhs;
    Expr rhs = parse_primary(cur);
    return Expr{Compare{*op, box(std::move(lhs)), box(std::move(rhs))}};
}

Expr parse_not(Cursor& cur) {
    if (cur.peek_word() == "not") {
        // Distinguish prefix `not x` from the `not in` that parse_comparison
        // handles: at expression start `not` is always the prefix operator.
        cur.take_word();
        Expr operand = parse_not(cur);
        return Expr{BoolExpr{BoolKind::Not, {box(std::move(operand))}}};
    }
    return parse_comparison(cur);
}

Expr parse_and(Cursor& cur) {
    Expr first = parse_not(cur);
    if (cur.peek_word() != "and") return first;
    BoolExpr node{BoolKind::And, {box(std::move(first))}};
    while (cur.match_word("and")) node.operands.push_back(box(parse_not(cur)));
    return Expr{std::move(node)};
}

Expr parse_or(Cursor& cur) {
    Expr first = parse_and(cur);
    if (cur.peek_word() != "or") return first;
    BoolExpr node{BoolKind::Or, {box(std::move(first))}};
    while (cur.match_word("or")) node.operands.push_back(box(parse_and(cur)));
    return Expr{std::move(node)};
}

std::vector<Expr> parse_call_args(Cursor& cur) {
    cur.expect_symbol("(");
    std::vector<Expr> args;
    if (cur.peek_char() != ')') {
        while (true) {
            args.push_back(parse_or(cur));
            if (cur.match_symbol(",")) continue;
            break;
        }
    }
    cur.expect_symbol(")");
    return args;
}

// --- statements --------------------------------------------------------------

class PlanParser {
public:
    explicit PlanParser(std::vector<LineRec> lines) : lines_(std::move(lines)) {}

    PlanAst run() {
        if (lines_.empty()) fail(1, 1, "empty input");
        parse_header();
        parse_function_body();
        return std::move(ast_);
    }

private:
    const LineRec* peek() const { return next_ < lines_.size() ? &lines_[next_] : nullptr; }
    const LineRec& take() { return lines_[next_++]; }

    void parse_header() {
        const LineRec& line = take();
        if (line.indent != 0) fail(line.number, 1, "the def header must not be indented");
        Cursor cur(line);
        if (!cur.match_word("def")) fail(line.number, cur.column(), "expected 'def'");
        ast_.name = cur.expect_name("a function name");
        cur.expect_symbol("(");
        if (!cur.match_word("agent")) fail(line.number, cur.column(), "expected 'agent' parameter");
        cur.expect_symbol(",");
        if (!cur.match_word("start_from"))
            fail(line.number, cur.column(), "expected 'start_from' parameter");
        cur.expect_symbol("=");
        ast_.start_from_default = static_cast<int>(cur.expect_int());
        cur.expect_symbol(")");
        cur.expect_symbol(":");
        cur.expect_end("the def header");
    }

    // `# [Step k] text` → (k, text); nullopt for a plain comment.
    static std::optional<std::pair<int, std::string>> match_step_comment(const std::string& text) {
        const std::string tag = "# [Step ";
        if (text.compare(0, tag.size(), tag) != 0) return std::nullopt;
        std::size_t pos = tag.size();
        std::size_t digits = pos;
        while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits])))
            ++digits;
        if (digits == pos || digits >= text.size() || text[digits] != ']') return std::nullopt;
        int index = std::stoi(text.substr(pos, digits - pos));
        std::size_t after = digits + 1;
        if (after < text.size() && text[after] == ' ') ++after;
        return std::make_pair(index, text.substr(after));
    }

    void close_subgoal(int error_line) {
        SubGoal& sg = ast_.subgoals.back();
        if (sg.body.empty())
            fail(error_line, 1, "sub-goal " + std::to_string(sg.index) + " has no statements");
    }

    void parse_function_body() {
        while (const LineRec* line = peek()) {
            if (line->indent == 0)
                fail(line->number, 1, "unexpected content at top level after the function body");
            if (line->indent != kIndentUnit)
                fail(line->number, line->indent + 1, "unexpected indentation");

            if (line->text[0] == '#') {
                auto step = match_step_comment(line->text);
                if (step) {
                    const auto& [index, comment] = *step;
                    if (comment.empty())
                        fail(line->number, line->indent + 1, "empty sub-goal description");
                    int expected = static_cast<int>(ast_.subgoals.size()) + 1;
                    if (index != expected)
                        fail(line->number, line->indent + 1,
                             "non-contiguous sub-goal indices: expected [Step " +
                                 std::to_string(expected) + "], found [Step " +
                                 std::to_string(index) + "]");
                    if (!ast_.subgoals.empty()) {
                        close_subgoal(line->number);
                        if (!ast_.subgoals.back().assertion)
                            fail(line->number, line->indent + 1,
                                 "sub-goal " + std::to_string(ast_.subgoals.back().index) +
                                     " is missing its assertion");
                    }
                    SubGoal sg;
                    sg.index = index;
                    sg.comment = comment;
                    sg.line = line->number;
                    ast_.subgoals.push_back(std::move(sg));
                    take();
                    continue;
                }
                if (ast_.subgoals.empty()) {
                    std::string text = line->text.substr(1);
                    if (!text.empty() && text[0] == ' ') text = text.substr(1);
                    ast_.preamble.push_back(text);
                    take();
                    continue;
                }
                fail(line->number, line->indent + 1,
                     "unexpected comment (only `# [Step k]` markers may follow the preamble)");
            }

            if (ast_.subgoals.empty())
                fail(line->number, line->indent + 1,
                     "statement before the first `# [Step 1]` comment");
            SubGoal& sg = ast_.subgoals.back();
            if (sg.assertion)
                fail(line->number, line->indent + 1,
                     "statement after the assertion of sub-goal " + std::to_string(sg.index));

            if (Cursor probe(*line); probe.peek_word() == "assert") {
                sg.assertion = parse_assert(take());
                continue;
            }
            sg.body.push_back(parse_statement(kIndentUnit));
        }

        if (ast_.subgoals.empty()) {
            int last = lines_.empty() ? 1 : lines_.back().number;
            fail(last, 1, "empty function body");
        }
        close_subgoal(lines_.back().number);
        // Final sub-goal may stay assertion-free.
    }

    AssertStep parse_assert(const LineRec& line) {
        Cursor cur(line);
        cur.match_word("assert");
        Expr cond = parse_or(cur);
        cur.expect_symbol(",");
        if (!cur.match_word("report"))
            fail(line.number, cur.column(), "expected report(...) after the assert condition");
        cur.expect_symbol("(");
        Expr message = parse_or(cur);
        cur.expect_symbol(")");
        cur.expect_end("the assert statement");
        AssertStep step{std::move(cond), std::move(message)};
        return step;
    }

    // One statement at `indent`; consumes nested block lines for for/if.
    Statement parse_statement(int indent) {
        const LineRec& line = take();
        Cursor cur(line);
        std::string head = cur.peek_word();

        if (head == "assert")
            fail(line.number, cur.column(), "assert is only allowed at sub-goal level");
        if (head == "for") return parse_for(line, cur, indent);
        if (head == "if") return parse_if(line, cur, indent);
        if (head == "else") fail(line.number, cur.column(), "else without a matching if");
        if (head == "break") fail(line.number, cur.column(), "break is only allowed as `if cond: break` at the end of a for body");
        if (head.empty() || kKeywords.count(head))
            fail(line.number, cur.column(), "expected a statement");

        cur.take_word();
        Statement stmt;
        stmt.line = line.number;
        if (cur.match_symbol("=")) {
            std::string binding = head;
            std::string callee = cur.peek_word();
            if (!callee.empty() && !kKeywords.count(callee)) {
                // Lookahead for a call: ident followed by '('.
                Cursor ahead = cur;
                ahead.take_word();
                if (ahead.peek_char() == '(') {
                    cur.take_word();
                    std::vector<Expr> args = parse_call_args(cur);
                    cur.expect_end("the call");
                    if (callee == "ask_llm") {
                        if (args.size() != 1)
                            fail(line.number, cur.column(), "ask_llm takes exactly one argument");
                        stmt.node = AskLlm{binding, std::move(args[0])};
                        return stmt;
                    }
                    stmt.node = ActionCall{binding, callee, std::move(args)};
                    return stmt;
                }
            }
            Expr value = parse_or(cur);
            cur.expect_end("the assignment");
            stmt.node = Assign{binding, std::move(value)};
            return stmt;
        }
        if (cur.peek_char() == '(') {
            if (head == "ask_llm")
                fail(line.number, cur.column(), "ask_llm requires a result binding");
            std::vector<Expr> args = parse_call_args(cur);
            cur.expect_end("the call");
            stmt.node = ActionCall{std::nullopt, head, std::move(args)};
            return stmt;
        }
        fail(line.number, cur.column(), "expected '=' or '(' after '" + head + "'");
    }

    Statement parse_for(const LineRec& line, Cursor& cur, int indent) {
        cur.match_word("for");
        ForEach node;
        node.var = cur.expect_name("a loop variable");
        if (!cur.match_word("in")) fail(line.number, cur.column(), "expected 'in'");
        node.iterable = parse_or(cur);
        cur.expect_symbol(":");
        cur.expect_end("the for header");

        int body_indent = indent + kIndentUnit;
        while (const LineRec* next = peek()) {
            if (next->indent < body_indent) break;
            if (next->indent > body_indent)
                fail(next->number, next->indent + 1, "unexpected indentation");
            if (next->text[0] == '#')
                fail(next->number, next->indent + 1, "comments are not allowed inside blocks");
            if (auto break_cond = try_parse_break_line(*next)) {
                take();
                node.break_when = std::move(*break_cond);
                if (const LineRec* after = peek(); after && after->indent >= body_indent)
                    fail(after->number, after->indent + 1,
                         "the break condition must be the last statement of the for body");
                break;
            }
            node.body.push_back(parse_statement(body_indent));
        }
        if (node.body.empty() && !node.break_when)
            fail(line.number, line.indent + 1, "expected an indented block after the for header");
        Statement stmt;
        stmt.node = std::move(node);
        stmt.line = line.number;
        return stmt;
    }

    // `if cond: break` → the break condition; nullopt if not that shape.
    static std::optional<Expr> try_parse_break_line(const LineRec& line) {
        Cursor cur(line);
        if (cur.peek_word() != "if") return std::nullopt;
        if (line.text.size() < 5 || line.text.substr(line.text.size() - 5) != "break")
            return std::nullopt;
        cur.take_word();
        Expr cond = parse_or(cur);
        if (!cur.match_symbol(":")) fail(line.number, cur.column(), "expected ':'");
        if (!cur.match_word("break"))
            fail(line.number, cur.column(), "expected 'break'");
        cur.expect_end("the break condition");
        return cond;
    }

    Statement parse_if(const LineRec& line, Cursor& cur, int indent) {
        cur.match_word("if");
        IfElse node;
        node.condition = parse_or(cur);
        cur.expect_symbol(":");
        if (!cur.at_end()) {
            if (cur.peek_word() == "break")
                fail(line.number, cur.column(),
                     "break is only allowed at the end of a for body");
            fail(line.number, cur.column(), "unexpected text after the if header");
        }

        int body_indent = indent + kIndentUnit;
        node.then_body = parse_block(body_indent, line);

        if (const LineRec* next = peek();
            next && next->indent == indent && next->text == "else:") {
            take();
            const LineRec& else_line = lines_[next_ - 1];
            node.else_body = parse_block(body_indent, else_line);
        }
        Statement stmt;
        stmt.node = std::move(node);
        stmt.line = line.number;
        return stmt;
    }

    std::vector<Statement> parse_block(int body_indent, const LineRec& header) {
        std::vector<Statement> body;
        while (const LineRec* next = peek()) {
            if (next->indent < body_indent) break;
            if (next->indent > body_indent)
                fail(next->number, next->indent + 1, "unexpected indentation");
            if (next->text[0] == '#')
                fail(next->number, next->indent + 1, "comments are not allowed inside blocks");
            body.push_back(parse_statement(body_indent));
        }
        if (body.empty())
            fail(header.number, header.indent + 1, "expected an indented block");
        return body;
    }

    std::vector<LineRec> lines_;
    std::size_t next_ = 0;
    PlanAst ast_;
};

std::vector<LineRec> split_lines(const std::string& source) {
    std::vector<LineRec> lines;
    int number = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t end = source.find('\n', start);
        std::string raw = source.substr(
            start, end == std::string::npos ? std::string::npos : end - start);
        ++number;
        start = end == std::string::npos ? source.size() + 1 : end + 1;

        while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' '))
            raw.pop_back();
        if (raw.empty()) continue;

        int indent = 0;
        while (indent < static_cast<int>(raw.size()) && raw[indent] == ' ') ++indent;
        if (indent < static_cast<int>(raw.size()) && raw[indent] == '\t')
            fail(number, indent + 1, "tabs are not allowed in indentation");
        lines.push_back(LineRec{number, indent, raw.substr(indent)});
    }
    return lines;
}

} // namespace

Result<PlanAst, ParseError> parse_plan(const std::string& source) {
    try {
        PlanParser parser(split_lines(source));
        return parser.run();
    } catch (const ParseAbort& abort) {
        return Result<PlanAst, ParseError>::failure(abort.error);
    }
}

} // namespace planloop::plan
