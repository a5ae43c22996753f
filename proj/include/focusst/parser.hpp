#pragma once

#include <cctype>
#include <charconv>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "focusst/analysis.hpp"
#include "focusst/ast.hpp"
#include "focusst/diagnostics.hpp"

namespace focusst {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class TokenKind {
    Ident,
    Number,
    Colon,
    Comma,
    Dot,
    DotDot,
    Prime,
    Pipe,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,   // also comparison <
    RAngle,   // also comparison >
    Le,
    Ge,
    Eq,
    Ne,
    Plus,
    Minus,
    RuleArrow,  // ==>
    Implies,    // ->
    At,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    Nat value = 0;        // Number payload
    SourceSpan span;
    bool line_start = false;
};

namespace detail {

inline std::vector<Token> lex(std::string_view text, const std::string& file,
                              std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    Nat line = 1, column = 1;
    size_t i = 0;
    bool at_line_start = true;

    auto span_here = [&](Nat length) { return SourceSpan{file, line, column, length}; };
    auto push = [&](TokenKind kind, std::string tok_text, Nat length) {
        out.push_back({kind, std::move(tok_text), 0, span_here(length), at_line_start});
        at_line_start = false;
        column += length;
    };

    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++i;
            ++line;
            column = 1;
            at_line_start = true;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++column;
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
            while (i < text.size() && text[i] != '\n')
                ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
                ++j;
            std::string_view digits = text.substr(i, j - i);
            Nat value = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
            if (ec != std::errc{} || ptr != digits.data() + digits.size())
                diags.push_back({Severity::Error, "number literal out of range", span_here(digits.size())});
            out.push_back({TokenKind::Number, std::string(digits), value, span_here(digits.size()),
                           at_line_start});
            at_line_start = false;
            column += digits.size();
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            push(TokenKind::Ident, std::string(text.substr(i, j - i)), j - i);
            i = j;
            continue;
        }
        auto two = [&](char second) { return i + 1 < text.size() && text[i + 1] == second; };
        switch (c) {
        case ':': push(TokenKind::Colon, ":", 1); ++i; break;
        case ',': push(TokenKind::Comma, ",", 1); ++i; break;
        case '\'': push(TokenKind::Prime, "'", 1); ++i; break;
        case '|': push(TokenKind::Pipe, "|", 1); ++i; break;
        case '(': push(TokenKind::LParen, "(", 1); ++i; break;
        case ')': push(TokenKind::RParen, ")", 1); ++i; break;
        case '[': push(TokenKind::LBracket, "[", 1); ++i; break;
        case ']': push(TokenKind::RBracket, "]", 1); ++i; break;
        case '@': push(TokenKind::At, "@", 1); ++i; break;
        case '+': push(TokenKind::Plus, "+", 1); ++i; break;
        case '.':
            if (two('.')) {
                push(TokenKind::DotDot, "..", 2);
                i += 2;
            } else {
                push(TokenKind::Dot, ".", 1);
                ++i;
            }
            break;
        case '-':
            if (two('>')) {
                push(TokenKind::Implies, "->", 2);
                i += 2;
            } else {
                push(TokenKind::Minus, "-", 1);
                ++i;
            }
            break;
        case '=':
            if (two('=') && i + 2 < text.size() && text[i + 2] == '>') {
                push(TokenKind::RuleArrow, "==>", 3);
                i += 3;
            } else {
                push(TokenKind::Eq, "=", 1);
                ++i;
            }
            break;
        case '<':
            if (two('=')) {
                push(TokenKind::Le, "<=", 2);
                i += 2;
            } else {
                push(TokenKind::LAngle, "<", 1);
                ++i;
            }
            break;
        case '>':
            if (two('=')) {
                push(TokenKind::Ge, ">=", 2);
                i += 2;
            } else {
                push(TokenKind::RAngle, ">", 1);
                ++i;
            }
            break;
        case '/':
            if (two('=')) {
                push(TokenKind::Ne, "/=", 2);
                i += 2;
            } else {
                diags.push_back({Severity::Error, "unexpected character '/'", span_here(1)});
                ++i;
            }
            break;
        default:
            diags.push_back(
                {Severity::Error, std::string("unexpected character '") + c + "'", span_here(1)});
            ++i;
            ++column;
            break;
        }
    }
    Token end;
    end.kind = TokenKind::End;
    end.span = {file, line, column, 0};
    end.line_start = at_line_start;
    out.push_back(end);
    return out;
}

inline bool is_label_ident(const std::string& text) {
    return detail::label_matches(text, 'A') || detail::label_matches(text, 'I') ||
           detail::label_matches(text, 'B');
}

inline bool is_section_keyword(const std::string& text) {
    static const std::set<std::string> kws = {"in",   "out",  "local",    "asm",     "gar",
                                              "component", "wire", "external", "monitor"};
    return kws.count(text) > 0;
}

inline bool is_top_keyword(const std::string& text) {
    return text == "spec" || text == "network" || text == "type";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

// Recursive-descent parser for the textual surface syntax. Parsing never
// throws for input errors; every problem is reported as a Diagnostic with a
// span inside the input.
class Parser {
public:
    Parser(std::string_view text, std::string file, SpecRegistry& registry)
        : file_(std::move(file)), registry_(registry) {
        tokens_ = detail::lex(text, file_, diags_);
        limit_ = tokens_.size() - 1;  // index of End token
    }

    // Parses the whole file, registering declarations as they validate.
    SpecFile parse_file() {
        SpecFile out;
        if (peek().kind == TokenKind::End && diags_.empty())
            error(peek().span, "expected spec header");
        while (peek().kind != TokenKind::End) {
            const Token& t = peek();
            if (t.kind != TokenKind::Ident) {
                error(t.span, "expected 'type', 'spec', or 'network'");
                synchronize_top();
                continue;
            }
            if (t.text == "type") {
                if (auto decl = parse_type_decl()) {
                    registry_.types().declare(decl->name, decl->type);
                    out.types.push_back(std::move(*decl));
                }
            } else if (t.text == "spec") {
                if (auto spec = parse_spec_decl()) {
                    auto spec_diags = validate_spec(*spec, registry_.types());
                    append(spec_diags);
                    if (!has_errors(spec_diags)) {
                        registry_.add(*spec);
                        out.specs.push_back(std::move(*spec));
                    }
                }
            } else if (t.text == "network") {
                if (auto net = parse_network_decl()) {
                    auto net_diags = validate_network(*net, registry_);
                    append(net_diags);
                    if (!has_errors(net_diags))
                        out.networks.push_back(std::move(*net));
                }
            } else {
                error(t.span, "expected spec header");
                synchronize_top();
            }
        }
        return out;
    }

    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    // --- token plumbing -----------------------------------------------------

    const Token& peek(size_t ahead = 0) const {
        size_t idx = std::min(pos_ + ahead, limit_);
        return tokens_[idx];
    }

    const Token& advance() {
        const Token& t = tokens_[std::min(pos_, limit_)];
        if (pos_ < limit_)
            ++pos_;
        return t;
    }

    bool at_end() const { return pos_ >= limit_; }

    bool at(TokenKind kind) const { return peek().kind == kind; }

    bool at_keyword(const char* kw) const {
        return peek().kind == TokenKind::Ident && peek().text == kw;
    }

    bool accept(TokenKind kind) {
        if (at(kind)) {
            advance();
            return true;
        }
        return false;
    }

    bool accept_keyword(const char* kw) {
        if (at_keyword(kw)) {
            advance();
            return true;
        }
        return false;
    }

    std::optional<Token> expect(TokenKind kind, const char* what) {
        if (at(kind))
            return advance();
        error(peek().span, std::string("expected ") + what);
        return std::nullopt;
    }

    std::optional<std::string> expect_ident(const char* what) {
        if (at(TokenKind::Ident) && !detail::is_top_keyword(peek().text))
            return advance().text;
        error(peek().span, std::string("expected ") + what);
        return std::nullopt;
    }

    void error(const SourceSpan& span, std::string msg) {
        diags_.push_back({Severity::Error, std::move(msg), span});
    }

    void append(const std::vector<Diagnostic>& more) {
        diags_.insert(diags_.end(), more.begin(), more.end());
    }

    void synchronize_top() {
        while (!at_end() && !(peek().kind == TokenKind::Ident && peek().line_start &&
                              detail::is_top_keyword(peek().text)))
            advance();
    }

    // True at a token that terminates the current section item: EOF, a
    // line-initial section/top keyword, or a label followed by ':'.
    bool at_item_boundary() const {
        const Token& t = peek();
        if (t.kind == TokenKind::End || pos_ >= limit_)
            return true;
        if (t.kind != TokenKind::Ident)
            return false;
        if (t.line_start && (detail::is_section_keyword(t.text) || detail::is_top_keyword(t.text)))
            return true;
        return detail::is_label_ident(t.text) && peek(1).kind == TokenKind::Colon;
    }

    size_t find_item_end() const {
        size_t saved = pos_;
        size_t scan = pos_;
        auto* self = const_cast<Parser*>(this);
        size_t result = limit_;
        while (scan < limit_) {
            self->pos_ = scan;
            if (at_item_boundary()) {
                result = scan;
                break;
            }
            ++scan;
        }
        self->pos_ = saved;
        return result;
    }

    void skip_to_item_boundary() {
        while (!at_end() && !at_item_boundary())
            advance();
    }

    // --- types ----------------------------------------------------------------

    std::optional<MessageType> parse_type() {
        if (at(TokenKind::Ident)) {
            std::string name = peek().text;
            if (name == "Nat") {
                advance();
                return MessageType::nat();
            }
            if (name == "Bool") {
                advance();
                return MessageType::boolean();
            }
            if (name == "Bit") {
                advance();
                return MessageType::bit();
            }
            if (name == "List") {
                advance();
                if (!expect(TokenKind::LParen, "'(' after List"))
                    return std::nullopt;
                auto elem = parse_type();
                if (!elem)
                    return std::nullopt;
                if (!expect(TokenKind::RParen, "')'"))
                    return std::nullopt;
                return MessageType::list(*elem);
            }
            const auto* named = registry_.types().lookup(name);
            if (!named) {
                error(peek().span, "unknown type '" + name + "'");
                advance();
                return std::nullopt;
            }
            advance();
            return *named;
        }
        error(peek().span, "expected a type");
        return std::nullopt;
    }

    std::optional<TypeDecl> parse_type_decl() {
        SourceSpan span = peek().span;
        advance();  // 'type'
        auto name = expect_ident("type name");
        if (!name || !expect(TokenKind::Eq, "'='")) {
            synchronize_top();
            return std::nullopt;
        }
        struct Ctor {
            std::string name;
            std::vector<RecordField> fields;
            bool has_fields = false;
        };
        std::vector<Ctor> ctors;
        do {
            auto ctor = expect_ident("constructor name");
            if (!ctor) {
                synchronize_top();
                return std::nullopt;
            }
            Ctor c{*ctor, {}, false};
            if (accept(TokenKind::LParen)) {
                c.has_fields = true;
                do {
                    auto sel = expect_ident("selector name");
                    if (!sel || !expect(TokenKind::Colon, "':'")) {
                        synchronize_top();
                        return std::nullopt;
                    }
                    auto type = parse_type();
                    if (!type) {
                        synchronize_top();
                        return std::nullopt;
                    }
                    c.fields.push_back(make_field(*sel, *type));
                } while (accept(TokenKind::Comma));
                if (!expect(TokenKind::RParen, "')'")) {
                    synchronize_top();
                    return std::nullopt;
                }
            }
            ctors.push_back(std::move(c));
        } while (accept(TokenKind::Pipe));

        bool any_fields = false;
        for (const auto& c : ctors)
            any_fields |= c.has_fields;
        try {
            if (any_fields) {
                std::vector<RecordVariant> variants;
                for (auto& c : ctors)
                    variants.push_back({c.name, std::move(c.fields)});
                return TypeDecl{*name, MessageType::record(*name, std::move(variants)), span};
            }
            std::vector<std::string> names;
            for (const auto& c : ctors)
                names.push_back(c.name);
            return TypeDecl{*name, MessageType::enumeration(*name, std::move(names)), span};
        } catch (const TypeError& e) {
            error(span, e.what());
            return std::nullopt;
        }
    }

    // --- expressions ------------------------------------------------------------

    ExprPtr parse_expr() { return parse_implies(); }

    ExprPtr parse_implies() {
        ExprPtr lhs = parse_or();
        if (!lhs)
            return nullptr;
        if (accept(TokenKind::Implies)) {
            ExprPtr rhs = parse_implies();
            if (!rhs)
                return nullptr;
            SourceSpan span = lhs->span;
            return make_expr(BinExpr{BinOp::Implies, std::move(lhs), std::move(rhs)}, span);
        }
        return lhs;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (lhs && at_keyword("or")) {
            advance();
            ExprPtr rhs = parse_and();
            if (!rhs)
                return nullptr;
            SourceSpan span = lhs->span;
            lhs = make_expr(BinExpr{BinOp::Or, std::move(lhs), std::move(rhs)}, span);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (lhs && at_keyword("and")) {
            advance();
            ExprPtr rhs = parse_not();
            if (!rhs)
                return nullptr;
            SourceSpan span = lhs->span;
            lhs = make_expr(BinExpr{BinOp::And, std::move(lhs), std::move(rhs)}, span);
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (at_keyword("not")) {
            SourceSpan span = advance().span;
            ExprPtr arg = parse_not();
            if (!arg)
                return nullptr;
            return make_expr(NotExpr{std::move(arg)}, span);
        }
        return parse_comparison();
    }

    std::optional<BinOp> peek_cmp_op() const {
        switch (peek().kind) {
        case TokenKind::LAngle: return BinOp::Lt;
        case TokenKind::Le: return BinOp::Le;
        case TokenKind::RAngle: return BinOp::Gt;
        case TokenKind::Ge: return BinOp::Ge;
        case TokenKind::Eq: return BinOp::Eq;
        case TokenKind::Ne: return BinOp::Ne;
        default: return std::nullopt;
        }
    }

    // Comparisons may chain (a <= b <= c) and desugar to a conjunction.
    ExprPtr parse_comparison() {
        ExprPtr lhs = parse_additive();
        if (!lhs)
            return nullptr;
        auto op = peek_cmp_op();
        if (!op)
            return lhs;
        advance();
        ExprPtr mid = parse_additive();
        if (!mid)
            return nullptr;
        SourceSpan span = lhs->span;
        ExprPtr result = make_expr(BinExpr{*op, std::move(lhs), mid}, span);
        while (auto next = peek_cmp_op()) {
            advance();
            ExprPtr rhs = parse_additive();
            if (!rhs)
                return nullptr;
            ExprPtr link = make_expr(BinExpr{*next, mid, rhs}, span);
            result = make_expr(BinExpr{BinOp::And, std::move(result), std::move(link)}, span);
            mid = std::move(rhs);
        }
        return result;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_primary();
        while (lhs && (at(TokenKind::Plus) || at(TokenKind::Minus))) {
            BinOp op = at(TokenKind::Plus) ? BinOp::Add : BinOp::Sub;
            advance();
            ExprPtr rhs = parse_primary();
            if (!rhs)
                return nullptr;
            SourceSpan span = lhs->span;
            lhs = make_expr(BinExpr{op, std::move(lhs), std::move(rhs)}, span);
        }
        return lhs;
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
        case TokenKind::Number: {
            advance();
            return make_expr(NumLit{t.value}, t.span);
        }
        case TokenKind::LParen: {
            advance();
            ExprPtr inner = parse_expr();
            if (!inner)
                return nullptr;
            if (!expect(TokenKind::RParen, "')'"))
                return nullptr;
            return inner;
        }
        case TokenKind::LAngle:
            return parse_list_literal();
        case TokenKind::Ident: {
            if (t.text == "true") {
                advance();
                return make_expr(BoolLit{true}, t.span);
            }
            if (t.text == "false") {
                advance();
                return make_expr(BoolLit{false}, t.span);
            }
            if (t.text == "ft") {
                advance();
                if (!expect(TokenKind::LParen, "'(' after ft"))
                    return nullptr;
                ExprPtr arg = parse_expr();
                if (!arg)
                    return nullptr;
                if (!expect(TokenKind::RParen, "')'"))
                    return nullptr;
                return make_expr(FtExpr{std::move(arg)}, t.span);
            }
            if (t.text == "if") {
                advance();
                ExprPtr cond = parse_expr();
                if (!cond || !accept_keyword("then")) {
                    if (cond)
                        error(peek().span, "expected 'then'");
                    return nullptr;
                }
                ExprPtr then_e = parse_expr();
                if (!then_e || !accept_keyword("else")) {
                    if (then_e)
                        error(peek().span, "expected 'else'");
                    return nullptr;
                }
                ExprPtr else_e = parse_expr();
                if (!else_e || !accept_keyword("fi")) {
                    if (else_e)
                        error(peek().span, "expected 'fi'");
                    return nullptr;
                }
                return make_expr(IfExpr{std::move(cond), std::move(then_e), std::move(else_e)}, t.span);
            }
            advance();
            // channel interval read: name[t] or name@t
            if (at(TokenKind::LBracket) && peek(1).kind == TokenKind::Ident && peek(1).text == "t") {
                if (peek(2).kind == TokenKind::RBracket) {
                    advance();
                    advance();
                    advance();
                    return make_expr(IntervalRead{t.text}, t.span);
                }
                if (peek(2).kind == TokenKind::Plus) {
                    error(peek().span, "intervals at t+1 can only be assigned, not read");
                    return nullptr;
                }
            }
            if (at(TokenKind::At) && peek(1).kind == TokenKind::Ident && peek(1).text == "t") {
                advance();
                advance();
                return make_expr(IntervalRead{t.text}, t.span);
            }
            return make_expr(VarRead{t.text, VarKind::Unresolved}, t.span);
        }
        default:
            error(t.span, "expected an expression");
            advance();
            return nullptr;
        }
    }

    // List elements parse at additive level so the closing '>' stays
    // unambiguous; comparisons inside a literal need parentheses.
    ExprPtr parse_list_literal() {
        const Token& open = peek();
        advance();  // '<'
        ListExpr list;
        if (accept(TokenKind::RAngle))
            return make_expr(std::move(list), open.span);
        do {
            ExprPtr el = parse_additive();
            if (!el)
                return nullptr;
            list.elements.push_back(std::move(el));
        } while (accept(TokenKind::Comma));
        if (!expect(TokenKind::RAngle, "'>' closing list"))
            return nullptr;
        return make_expr(std::move(list), open.span);
    }

    // --- specs ------------------------------------------------------------------

    std::optional<ComponentSpec> parse_spec_decl() {
        ComponentSpec spec;
        spec.span = peek().span;
        advance();  // 'spec'
        auto name = expect_ident("spec name");
        if (!name) {
            synchronize_top();
            return std::nullopt;
        }
        spec.name = *name;
        spec.causality = Causality::StronglyCausal;
        if (accept_keyword("weakly")) {
            spec.causality = Causality::WeaklyCausal;
            if (!accept_keyword("causal"))
                error(peek().span, "expected 'causal'");
        } else if (accept_keyword("strongly")) {
            if (!accept_keyword("causal"))
                error(peek().span, "expected 'causal'");
        }

        while (!at_end()) {
            const Token& t = peek();
            if (t.kind != TokenKind::Ident)
                break;
            if (detail::is_top_keyword(t.text))
                break;
            if (t.text == "in" || t.text == "out") {
                Polarity pol = t.text == "in" ? Polarity::In : Polarity::Out;
                advance();
                do {
                    SourceSpan span = peek().span;
                    auto chan = expect_ident("channel name");
                    if (!chan || !expect(TokenKind::Colon, "':'")) {
                        skip_to_item_boundary();
                        break;
                    }
                    auto type = parse_type();
                    if (!type) {
                        skip_to_item_boundary();
                        break;
                    }
                    spec.channels.push_back({*chan, *type, pol, span});
                } while (accept(TokenKind::Comma));
            } else if (t.text == "local") {
                advance();
                do {
                    SourceSpan span = peek().span;
                    auto var = expect_ident("local variable name");
                    if (!var || !expect(TokenKind::Colon, "':'")) {
                        skip_to_item_boundary();
                        break;
                    }
                    auto type = parse_type();
                    if (!type || !expect(TokenKind::Eq, "'=' and an initial value")) {
                        skip_to_item_boundary();
                        break;
                    }
                    ExprPtr init = parse_expr();
                    if (!init) {
                        skip_to_item_boundary();
                        break;
                    }
                    spec.locals.push_back({*var, *type, std::move(init), std::nullopt, span});
                } while (accept(TokenKind::Comma));
            } else if (t.text == "asm") {
                advance();
                parse_asm_items(spec);
            } else if (t.text == "gar") {
                advance();
                parse_gar_items(spec);
            } else {
                break;
            }
        }
        return spec;
    }

    void parse_asm_items(ComponentSpec& spec) {
        while (!at_end()) {
            if (!(peek().kind == TokenKind::Ident && detail::is_label_ident(peek().text) &&
                  peek(1).kind == TokenKind::Colon))
                break;
            Token label = advance();
            advance();  // ':'
            size_t end = find_item_end();
            size_t saved_limit = limit_;
            limit_ = end;
            auto pred = parse_pred();
            if (pred)
                spec.assumptions.push_back({label.text, std::move(*pred), label.span});
            skip_to_item_boundary();
            limit_ = saved_limit;
        }
    }

    std::optional<MonitorPred> parse_pred() {
        const Token& t = peek();
        if (t.kind == TokenKind::Ident && t.text == "true" && pos_ + 1 >= limit_) {
            advance();
            return MonitorPred{TruePred{}};
        }
        if (t.kind == TokenKind::Ident && t.text == "ts" && peek(1).kind == TokenKind::LParen) {
            advance();
            advance();
            auto chan = expect_ident("channel name");
            if (!chan || !expect(TokenKind::RParen, "')'"))
                return std::nullopt;
            return MonitorPred{TsPred{*chan}};
        }
        if (t.kind == TokenKind::Ident && t.text == "msg" && peek(1).kind == TokenKind::LParen) {
            advance();
            advance();
            auto chan = expect_ident("channel name");
            if (!chan || !expect(TokenKind::Comma, "','"))
                return std::nullopt;
            auto num = expect(TokenKind::Number, "message bound");
            if (!num || !expect(TokenKind::RParen, "')'"))
                return std::nullopt;
            return MonitorPred{MsgPred{*chan, num->value}};
        }
        // bare `a = b` is stream equality
        if (t.kind == TokenKind::Ident && peek(1).kind == TokenKind::Eq &&
            peek(2).kind == TokenKind::Ident && pos_ + 3 >= limit_) {
            std::string left = advance().text;
            advance();
            std::string right = advance().text;
            return MonitorPred{StreamEqPred{left, right}};
        }
        ExprPtr expr = parse_expr();
        if (!expr)
            return std::nullopt;
        auto chan = single_channel_of(expr);
        if (!chan) {
            error(expr->span, "interval predicate must read exactly one channel");
            return std::nullopt;
        }
        return MonitorPred{IntervalPred{*chan, std::move(expr)}};
    }

    std::optional<std::string> single_channel_of(const ExprPtr& e) {
        std::set<std::string> chans;
        collect_channels(e, chans);
        if (chans.size() != 1)
            return std::nullopt;
        return *chans.begin();
    }

    static void collect_channels(const ExprPtr& e, std::set<std::string>& out) {
        if (!e)
            return;
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, IntervalRead>) {
                    out.insert(node.channel);
                } else if constexpr (std::is_same_v<T, FtExpr> || std::is_same_v<T, NotExpr>) {
                    collect_channels(node.arg, out);
                } else if constexpr (std::is_same_v<T, ListExpr>) {
                    for (const auto& el : node.elements)
                        collect_channels(el, out);
                } else if constexpr (std::is_same_v<T, BinExpr>) {
                    collect_channels(node.lhs, out);
                    collect_channels(node.rhs, out);
                } else if constexpr (std::is_same_v<T, IfExpr>) {
                    collect_channels(node.cond, out);
                    collect_channels(node.then_branch, out);
                    collect_channels(node.else_branch, out);
                }
            },
            e->node);
    }

    void parse_gar_items(ComponentSpec& spec) {
        while (!at_end()) {
            if (!(peek().kind == TokenKind::Ident && detail::is_label_ident(peek().text) &&
                  peek(1).kind == TokenKind::Colon))
                break;
            Token label = advance();
            advance();  // ':'
            size_t end = find_item_end();
            size_t saved_limit = limit_;
            limit_ = end;
            if (label.text[0] == 'I') {
                if (auto ig = parse_initial_guarantee(label))
                    spec.guarantees.push_back({std::move(*ig)});
            } else if (gar_item_is_rule()) {
                if (auto rule = parse_rule(label))
                    spec.guarantees.push_back({std::move(*rule)});
            } else {
                if (auto pred = parse_pred())
                    spec.guarantees.push_back({LabeledPred{label.text, std::move(*pred), label.span}});
            }
            skip_to_item_boundary();
            limit_ = saved_limit;
        }
    }

    std::optional<InitialGuarantee> parse_initial_guarantee(const Token& label) {
        InitialGuarantee ig;
        ig.label = label.text;
        ig.span = label.span;
        auto chan = expect_ident("output channel");
        if (!chan)
            return std::nullopt;
        ig.channel = *chan;
        if (!expect(TokenKind::LBracket, "'[0]'"))
            return std::nullopt;
        auto idx = expect(TokenKind::Number, "'0'");
        if (!idx || idx->value != 0) {
            if (idx)
                error(idx->span, "initial guarantees fix the interval at time 0");
            return std::nullopt;
        }
        if (!expect(TokenKind::RBracket, "']'") || !expect(TokenKind::Eq, "'='"))
            return std::nullopt;
        if (!at(TokenKind::LAngle)) {
            error(peek().span, "expected an interval literal");
            return std::nullopt;
        }
        ExprPtr list = parse_list_literal();
        if (!list)
            return std::nullopt;
        ig.elements = std::get<ListExpr>(list->node).elements;
        return ig;
    }

    // Classifies the current gar item (label already consumed) as a rule.
    // `==>` only ever separates a guard from effects, so its presence decides
    // immediately; otherwise the shape of the first top-level `=` decides.
    bool gar_item_is_rule() const {
        if (at_keyword("choose") || at_keyword("if"))
            return true;
        if (contains_rule_arrow())
            return true;
        // Angle brackets double as comparisons, so nesting depth tracks
        // parens and square brackets only; `=` never occurs inside them
        // except within list literals on an assignment's right-hand side,
        // which always lies after the first top-level `=`.
        int depth = 0;
        for (size_t i = pos_; i < limit_; ++i) {
            const Token& t = tokens_[i];
            switch (t.kind) {
            case TokenKind::LParen:
            case TokenKind::LBracket:
                ++depth;
                break;
            case TokenKind::RParen:
            case TokenKind::RBracket:
                --depth;
                break;
            case TokenKind::Eq:
                if (depth == 0) {
                    // assignment if everything before '=' is a plain target:
                    // IDENT, IDENT', or IDENT [ t | t+1 ]
                    size_t n = i - pos_;
                    const Token* first = &tokens_[pos_];
                    if (n == 2 && first[0].kind == TokenKind::Ident && first[1].kind == TokenKind::Prime)
                        return true;
                    if (n >= 4 && first[0].kind == TokenKind::Ident &&
                        first[1].kind == TokenKind::LBracket && tokens_[i - 1].kind == TokenKind::RBracket)
                        return true;
                    if (n == 1 && first[0].kind == TokenKind::Ident) {
                        // `a = b` with both sides bare idents is stream equality
                        bool stream_eq = (limit_ - i == 2) && tokens_[i + 1].kind == TokenKind::Ident;
                        return !stream_eq;
                    }
                    return false;
                }
                break;
            default:
                break;
            }
        }
        return false;
    }

    std::optional<TransitionRule> parse_rule(const Token& label) {
        TransitionRule rule;
        rule.label = label.text;
        rule.span = label.span;

        while (at_keyword("choose")) {
            SourceSpan span = advance().span;
            auto var = expect_ident("choice variable");
            if (!var || !accept_keyword("in")) {
                if (var)
                    error(peek().span, "expected 'in'");
                return std::nullopt;
            }
            auto lo = expect(TokenKind::Number, "range start");
            if (!lo || !expect(TokenKind::DotDot, "'..'"))
                return std::nullopt;
            auto hi = expect(TokenKind::Number, "range end");
            if (!hi)
                return std::nullopt;
            rule.choices.push_back({*var, lo->value, hi->value, span});
            if (!accept(TokenKind::Comma))
                break;
        }

        // Optional guard: an expression followed by ==>.
        if (contains_rule_arrow()) {
            rule.guard = parse_expr();
            if (!rule.guard)
                return std::nullopt;
            if (!expect(TokenKind::RuleArrow, "'==>'"))
                return std::nullopt;
        }

        auto effects = parse_effect_list();
        if (!effects)
            return std::nullopt;
        rule.effect = std::move(*effects);
        if (rule.effect.items.empty() && rule.choices.empty()) {
            error(label.span, "rule '" + label.text + "' has no effects");
            return std::nullopt;
        }
        return rule;
    }

    bool contains_rule_arrow() const {
        for (size_t i = pos_; i < limit_; ++i)
            if (tokens_[i].kind == TokenKind::RuleArrow)
                return true;
        return false;
    }

    std::optional<EffectBlock> parse_effect_list() {
        EffectBlock block;
        do {
            if (at_keyword("if")) {
                SourceSpan span = advance().span;
                IfEffect ife;
                ife.cond = parse_expr();
                if (!ife.cond)
                    return std::nullopt;
                if (!accept_keyword("then")) {
                    error(peek().span, "expected 'then'");
                    return std::nullopt;
                }
                auto then_block = parse_effect_list();
                if (!then_block)
                    return std::nullopt;
                ife.then_branch = std::move(*then_block);
                if (!accept_keyword("else")) {
                    error(peek().span, "expected 'else'");
                    return std::nullopt;
                }
                auto else_block = parse_effect_list();
                if (!else_block)
                    return std::nullopt;
                ife.else_branch = std::move(*else_block);
                if (!accept_keyword("fi")) {
                    error(peek().span, "expected 'fi'");
                    return std::nullopt;
                }
                (void)span;
                block.items.push_back({std::move(ife)});
            } else {
                auto assign = parse_assignment();
                if (!assign)
                    return std::nullopt;
                block.items.push_back({std::move(*assign)});
            }
            // the list continues over ',' until 'else'/'fi' or item end
            if (at_keyword("else") || at_keyword("fi"))
                break;
        } while (accept(TokenKind::Comma));
        return block;
    }

    std::optional<Assignment> parse_assignment() {
        Assignment assign;
        assign.span = peek().span;
        auto target = expect_ident("assignment target");
        if (!target)
            return std::nullopt;
        assign.target = *target;
        if (accept(TokenKind::Prime)) {
            assign.target_kind = AssignTargetKind::Local;
            assign.index_form = OutIndexForm::None;
        } else if (accept(TokenKind::LBracket)) {
            assign.target_kind = AssignTargetKind::Output;
            if (!(at(TokenKind::Ident) && peek().text == "t")) {
                error(peek().span, "expected 't' or 't+1' as output index");
                return std::nullopt;
            }
            advance();
            if (accept(TokenKind::Plus)) {
                auto one = expect(TokenKind::Number, "'1'");
                if (!one || one->value != 1) {
                    if (one)
                        error(one->span, "outputs are written at t or t+1");
                    return std::nullopt;
                }
                assign.index_form = OutIndexForm::Next;
            } else {
                assign.index_form = OutIndexForm::Cur;
            }
            if (!expect(TokenKind::RBracket, "']'"))
                return std::nullopt;
        } else {
            assign.target_kind = AssignTargetKind::Output;
            assign.index_form = OutIndexForm::None;
        }
        if (!expect(TokenKind::Eq, "'='"))
            return std::nullopt;
        assign.value = parse_expr();
        if (!assign.value)
            return std::nullopt;
        return assign;
    }

    // --- networks ---------------------------------------------------------------

    std::optional<Network> parse_network_decl() {
        Network net;
        net.span = peek().span;
        advance();  // 'network'
        auto name = expect_ident("network name");
        if (!name) {
            synchronize_top();
            return std::nullopt;
        }
        net.name = *name;
        if (at_keyword("post_update")) {
            advance();
            net.post_update_reads = true;
        }

        while (!at_end()) {
            const Token& t = peek();
            if (t.kind != TokenKind::Ident || detail::is_top_keyword(t.text))
                break;
            if (t.text == "component") {
                SourceSpan span = advance().span;
                auto spec_name = expect_ident("component name");
                if (!spec_name) {
                    skip_to_item_boundary();
                    continue;
                }
                std::string inst = *spec_name;
                if (accept_keyword("as")) {
                    auto alias = expect_ident("instance name");
                    if (alias)
                        inst = *alias;
                }
                net.instances.push_back({inst, *spec_name, {}, span});
            } else if (t.text == "wire") {
                SourceSpan span = advance().span;
                auto to = parse_port();
                if (!to || !expect(TokenKind::Eq, "'='")) {
                    skip_to_item_boundary();
                    continue;
                }
                auto from = parse_port();
                if (!from) {
                    skip_to_item_boundary();
                    continue;
                }
                net.wires.push_back({to->first, to->second, from->first, from->second, span});
            } else if (t.text == "external") {
                SourceSpan span = advance().span;
                auto to = parse_port();
                if (!to || !expect(TokenKind::Eq, "'='")) {
                    skip_to_item_boundary();
                    continue;
                }
                auto gen = parse_generator();
                if (!gen) {
                    skip_to_item_boundary();
                    continue;
                }
                net.externals.push_back({to->first, to->second, std::move(*gen), span});
            } else if (t.text == "monitor") {
                SourceSpan span = advance().span;
                auto spec_name = expect_ident("monitor component name");
                if (!spec_name) {
                    skip_to_item_boundary();
                    continue;
                }
                MonitorBinding mon;
                mon.name = *spec_name;
                mon.spec_name = *spec_name;
                mon.span = span;
                if (accept_keyword("as")) {
                    auto alias = expect_ident("monitor name");
                    if (alias)
                        mon.name = *alias;
                }
                while (accept_keyword("bind")) {
                    auto chan = expect_ident("monitor channel");
                    if (!chan || !expect(TokenKind::Eq, "'='"))
                        break;
                    auto from = parse_port();
                    if (!from)
                        break;
                    mon.binds.emplace_back(*chan, from->first, from->second);
                }
                net.monitors.push_back(std::move(mon));
            } else {
                break;
            }
        }
        return net;
    }

    std::optional<std::pair<std::string, std::string>> parse_port() {
        auto inst = expect_ident("instance name");
        if (!inst || !expect(TokenKind::Dot, "'.'"))
            return std::nullopt;
        auto chan = expect_ident("channel name");
        if (!chan)
            return std::nullopt;
        return std::make_pair(*inst, *chan);
    }

    std::optional<GeneratorDecl> parse_generator() {
        GeneratorDecl gen;
        gen.span = peek().span;
        if (accept_keyword("empty")) {
            gen.kind = GeneratorKind::Silent;
            return gen;
        }
        if (accept_keyword("cycle"))
            gen.kind = GeneratorKind::Cycle;
        else if (accept_keyword("hold"))
            gen.kind = GeneratorKind::Hold;
        else {
            error(peek().span, "expected 'cycle', 'hold', or 'empty'");
            return std::nullopt;
        }
        if (!expect(TokenKind::LBracket, "'['"))
            return std::nullopt;
        if (accept(TokenKind::RBracket))
            return gen;
        do {
            if (!at(TokenKind::LAngle)) {
                error(peek().span, "expected an interval literal");
                return std::nullopt;
            }
            ExprPtr list = parse_list_literal();
            if (!list)
                return std::nullopt;
            gen.interval_exprs.push_back(std::get<ListExpr>(list->node).elements);
        } while (accept(TokenKind::Comma));
        if (!expect(TokenKind::RBracket, "']'"))
            return std::nullopt;
        return gen;
    }

    std::string file_;
    SpecRegistry& registry_;
    std::vector<Token> tokens_;
    size_t pos_ = 0;
    size_t limit_ = 0;
    std::vector<Diagnostic> diags_;
};

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

struct ParseFileResult {
    SpecFile file;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

inline ParseFileResult parse_file(std::string_view text, const std::string& file_name,
                                  SpecRegistry& registry) {
    Parser parser(text, file_name, registry);
    SpecFile parsed = parser.parse_file();
    return {std::move(parsed), parser.diagnostics()};
}

struct ParseSpecResult {
    std::optional<ComponentSpec> spec;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return spec.has_value() && !has_errors(diagnostics); }
};

// Parses a source expected to contain (at least) one component spec;
// type declarations in the same source are honored.
inline ParseSpecResult parse_spec(std::string_view text, const SpecRegistry& base = {},
                                  const std::string& file_name = "<memory>") {
    SpecRegistry registry = base;
    auto result = parse_file(text, file_name, registry);
    if (!result.ok())
        return {std::nullopt, std::move(result.diagnostics)};
    if (result.file.specs.empty()) {
        result.diagnostics.push_back({Severity::Error, "expected spec header", {file_name, 1, 1, 0}});
        return {std::nullopt, std::move(result.diagnostics)};
    }
    return {std::move(result.file.specs.front()), std::move(result.diagnostics)};
}

struct ParseNetworkResult {
    std::optional<Network> network;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return network.has_value() && !has_errors(diagnostics); }
};

// Parses a source expected to contain one network; referenced components
// must already be registered.
inline ParseNetworkResult parse_network(std::string_view text, const SpecRegistry& base,
                                        const std::string& file_name = "<memory>") {
    SpecRegistry registry = base;
    auto result = parse_file(text, file_name, registry);
    if (!result.ok())
        return {std::nullopt, std::move(result.diagnostics)};
    if (result.file.networks.empty()) {
        result.diagnostics.push_back({Severity::Error, "expected a network", {file_name, 1, 1, 0}});
        return {std::nullopt, std::move(result.diagnostics)};
    }
    return {std::move(result.file.networks.front()), std::move(result.diagnostics)};
}

}  // namespace focusst
