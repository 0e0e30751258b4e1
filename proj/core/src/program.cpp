#include "gridblock/program.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <optional>

#include "xml.hpp"

namespace gridblock
{

bool RepeatLoop::operator==(const RepeatLoop & other) const
{
  return times == other.times && body == other.body;
}

std::vector<std::string> BlockCatalog::type_names() const
{
  std::vector<std::string> names;
  names.reserve(blocks.size());
  for (const auto & [name, fields] : blocks) names.push_back(name);
  return names;
}

BlockCatalog BlockCatalog::full()
{
  BlockCatalog cat;
  auto add = [&](std::string_view type, std::vector<std::string> fields) {
    cat.blocks.emplace(std::string(type), std::move(fields));
  };
  add(blocks::kMoveForward, {"SPEED", "DURATION"});
  add(blocks::kMoveBackward, {"SPEED", "DURATION"});
  add(blocks::kMoveLeft, {"SPEED", "DURATION"});
  add(blocks::kMoveRight, {"SPEED", "DURATION"});
  add(blocks::kTurnLeft, {"DEGREES"});
  add(blocks::kTurnRight, {"DEGREES"});
  add(blocks::kMoveKnight, {"DIR_X", "DIR_Y", "STEPS_X", "STEPS_Y"});
  add(blocks::kPickItem, {"ITEM"});
  add(blocks::kPlaceItem, {});
  add(blocks::kRepeat, {"TIMES"});
  add(blocks::kProcDef, {"NAME"});
  add(blocks::kProcCall, {"NAME"});
  return cat;
}

BlockCatalog BlockCatalog::of(const std::vector<std::string> & types)
{
  const auto all = full();
  BlockCatalog cat;
  for (const auto & t : types) {
    if (auto it = all.blocks.find(t); it != all.blocks.end()) cat.blocks.insert(*it);
  }
  return cat;
}

std::string_view to_string(ParseError::Kind kind)
{
  switch (kind) {
    case ParseError::Kind::XmlMalformed: return "XmlMalformed";
    case ParseError::Kind::InvalidStructure: return "InvalidStructure";
    case ParseError::Kind::UnknownBlockType: return "UnknownBlockType";
    case ParseError::Kind::MissingField: return "MissingField";
    case ParseError::Kind::DanglingCall: return "DanglingCall";
    case ParseError::Kind::RecursiveProcedure: return "RecursiveProcedure";
  }
  return "?";
}

std::string_view block_type(const Statement & s)
{
  struct Visitor
  {
    std::string_view operator()(const Move & m) const
    {
      switch (m.dir) {
        case RelDir::Forward: return blocks::kMoveForward;
        case RelDir::Backward: return blocks::kMoveBackward;
        case RelDir::Left: return blocks::kMoveLeft;
        case RelDir::Right: return blocks::kMoveRight;
      }
      return {};
    }
    std::string_view operator()(const Turn & t) const
    {
      return t.side == Side::Left ? blocks::kTurnLeft : blocks::kTurnRight;
    }
    std::string_view operator()(const KnightMove &) const { return blocks::kMoveKnight; }
    std::string_view operator()(const Pick &) const { return blocks::kPickItem; }
    std::string_view operator()(const Place &) const { return blocks::kPlaceItem; }
    std::string_view operator()(const RepeatLoop &) const { return blocks::kRepeat; }
    std::string_view operator()(const ProcCall &) const { return blocks::kProcCall; }
  };
  return std::visit(Visitor{}, s.node);
}

std::size_t count_statements(const StatementList & list)
{
  std::size_t n = 0;
  for (const auto & s : list) {
    ++n;
    if (const auto * loop = std::get_if<RepeatLoop>(&s.node)) n += count_statements(loop->body);
  }
  return n;
}

std::set<std::string> called_procedures(const StatementList & list)
{
  std::set<std::string> out;
  for (const auto & s : list) {
    if (const auto * call = std::get_if<ProcCall>(&s.node)) {
      out.insert(call->name);
    } else if (const auto * loop = std::get_if<RepeatLoop>(&s.node)) {
      out.merge(called_procedures(loop->body));
    }
  }
  return out;
}

namespace
{

// Procedures that can reach themselves through the call graph. Calls to
// unknown procedures are skipped.
std::vector<std::string> recursive_procedures(const std::map<std::string, StatementList> & procs)
{
  std::map<std::string, std::set<std::string>> edges;
  for (const auto & [name, body] : procs) edges[name] = called_procedures(body);

  std::vector<std::string> cyclic;
  for (const auto & [start, _] : procs) {
    std::set<std::string> seen;
    std::vector<std::string> stack(edges[start].begin(), edges[start].end());
    bool found = false;
    while (!stack.empty() && !found) {
      auto cur = stack.back();
      stack.pop_back();
      if (cur == start) {
        found = true;
        break;
      }
      if (!seen.insert(cur).second) continue;
      if (auto it = edges.find(cur); it != edges.end()) {
        stack.insert(stack.end(), it->second.begin(), it->second.end());
      }
    }
    if (found) cyclic.push_back(start);
  }
  return cyclic;
}

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string format_number(double v)
{
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

class BlockReader
{
public:
  explicit BlockReader(const BlockCatalog & catalog) : catalog_(catalog) {}

  BlockProgram read(const xml::Element & root)
  {
    if (xml::local_name(root.name) != "xml") {
      throw ParseError(ParseError::Kind::InvalidStructure, "root element must be <xml>, got <" + root.name + ">");
    }
    BlockProgram program;
    bool have_main = false;
    for (const auto & child : root.children) {
      if (xml::local_name(child.name) != "block") {
        throw ParseError(ParseError::Kind::InvalidStructure, "unexpected element <" + child.name + "> in <xml>");
      }
      if (type_of(child) == blocks::kProcDef) {
        auto [name, body] = read_definition(child);
        if (!program.procedures.emplace(name, std::move(body)).second) {
          throw ParseError(ParseError::Kind::InvalidStructure, "procedure '" + name + "' defined twice");
        }
      } else {
        if (have_main) {
          throw ParseError(ParseError::Kind::InvalidStructure, "more than one top-level block chain");
        }
        have_main = true;
        program.main = read_chain(child);
      }
    }

    auto check_calls = [&](const StatementList & list) {
      for (const auto & name : called_procedures(list)) {
        if (!program.procedures.count(name)) {
          throw ParseError(ParseError::Kind::DanglingCall, "call to undefined procedure '" + name + "'");
        }
      }
    };
    check_calls(program.main);
    for (const auto & [_, body] : program.procedures) check_calls(body);

    if (auto cyclic = recursive_procedures(program.procedures); !cyclic.empty()) {
      throw ParseError(ParseError::Kind::RecursiveProcedure, "procedure '" + cyclic.front() + "' calls itself");
    }
    return program;
  }

private:
  struct Parts
  {
    std::map<std::string, std::string> fields;
    std::map<std::string, const xml::Element *> statements;
    const xml::Element * next = nullptr;
    std::optional<std::string> mutation_name;
  };

  static std::string type_of(const xml::Element & block)
  {
    auto type = block.attribute("type");
    if (!type || type->empty()) {
      throw ParseError(ParseError::Kind::InvalidStructure, "<block> without a type attribute");
    }
    return *type;
  }

  static Parts split(const xml::Element & block)
  {
    Parts parts;
    for (const auto & child : block.children) {
      const auto tag = xml::local_name(child.name);
      if (tag == "field") {
        auto name = child.attribute("name");
        if (!name) throw ParseError(ParseError::Kind::InvalidStructure, "<field> without a name");
        if (!parts.fields.emplace(*name, trim(child.text)).second) {
          throw ParseError(ParseError::Kind::InvalidStructure, "duplicate field " + *name);
        }
      } else if (tag == "statement") {
        auto name = child.attribute("name");
        if (!name) throw ParseError(ParseError::Kind::InvalidStructure, "<statement> without a name");
        if (!parts.statements.emplace(*name, &child).second) {
          throw ParseError(ParseError::Kind::InvalidStructure, "duplicate statement " + *name);
        }
      } else if (tag == "next") {
        if (parts.next) throw ParseError(ParseError::Kind::InvalidStructure, "block has two <next> elements");
        parts.next = &child;
      } else if (tag == "mutation") {
        parts.mutation_name = child.attribute("name");
      } else {
        throw ParseError(ParseError::Kind::InvalidStructure, "unexpected element <" + child.name + "> in <block>");
      }
    }
    return parts;
  }

  // The single <block> inside a <next> or <statement>, or nullptr when empty.
  static const xml::Element * inner_block(const xml::Element & wrapper)
  {
    const xml::Element * found = nullptr;
    for (const auto & child : wrapper.children) {
      if (xml::local_name(child.name) != "block") {
        throw ParseError(
          ParseError::Kind::InvalidStructure, "unexpected element <" + child.name + "> in <" + wrapper.name + ">");
      }
      if (found) {
        throw ParseError(ParseError::Kind::InvalidStructure, "<" + wrapper.name + "> holds more than one block");
      }
      found = &child;
    }
    return found;
  }

  static const std::string & field(const Parts & parts, const std::string & type, const std::string & name)
  {
    auto it = parts.fields.find(name);
    if (it == parts.fields.end() || it->second.empty()) {
      throw ParseError(ParseError::Kind::MissingField, type + " block is missing field " + name);
    }
    return it->second;
  }

  static double positive_number(const Parts & parts, const std::string & type, const std::string & name)
  {
    const auto & text = field(parts, type, name);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value) || value <= 0.0) {
      throw ParseError(
        ParseError::Kind::MissingField, type + " field " + name + " must be a positive number, got '" + text + "'");
    }
    return value;
  }

  static std::int64_t integer(const Parts & parts, const std::string & type, const std::string & name)
  {
    const auto & text = field(parts, type, name);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ParseError(ParseError::Kind::MissingField, type + " field " + name + " must be an integer, got '" + text + "'");
    }
    return value;
  }

  static std::int64_t non_negative(const Parts & parts, const std::string & type, const std::string & name)
  {
    const auto v = integer(parts, type, name);
    if (v < 0) {
      throw ParseError(ParseError::Kind::MissingField, type + " field " + name + " must not be negative");
    }
    return v;
  }

  std::pair<std::string, StatementList> read_definition(const xml::Element & block)
  {
    const auto parts = split(block);
    const auto type = std::string(blocks::kProcDef);
    if (!catalog_.admits(type)) {
      throw ParseError(ParseError::Kind::UnknownBlockType, "block type '" + type + "' is not available");
    }
    auto name = field(parts, type, "NAME");
    if (parts.next) {
      throw ParseError(ParseError::Kind::InvalidStructure, "procedure definition '" + name + "' has a <next>");
    }
    StatementList body;
    const xml::Element * stack = nullptr;
    for (const char * key : {"STACK", "DO"}) {
      if (auto it = parts.statements.find(key); it != parts.statements.end()) {
        if (stack) throw ParseError(ParseError::Kind::InvalidStructure, "procedure '" + name + "' has two bodies");
        stack = it->second;
      }
    }
    if (parts.statements.size() != (stack ? 1u : 0u)) {
      throw ParseError(ParseError::Kind::InvalidStructure, "unexpected statement input on procedure '" + name + "'");
    }
    if (stack) {
      if (const auto * first = inner_block(*stack)) body = read_chain(*first);
    }
    return {std::move(name), std::move(body)};
  }

  StatementList read_chain(const xml::Element & first)
  {
    StatementList list;
    const xml::Element * block = &first;
    while (block) {
      if (xml::local_name(block->name) != "block") {
        throw ParseError(ParseError::Kind::InvalidStructure, "expected <block>, got <" + block->name + ">");
      }
      const auto parts = split(*block);
      list.push_back(read_statement(*block, parts));
      block = parts.next ? inner_block(*parts.next) : nullptr;
    }
    return list;
  }

  Statement read_statement(const xml::Element & block, const Parts & parts)
  {
    const auto type = type_of(block);
    if (!catalog_.admits(type) || type == blocks::kProcDef) {
      if (type == blocks::kProcDef) {
        throw ParseError(ParseError::Kind::InvalidStructure, "procedure definitions must be top-level blocks");
      }
      throw ParseError(ParseError::Kind::UnknownBlockType, "unknown block type '" + type + "'");
    }
    if (type != blocks::kRepeat && !parts.statements.empty()) {
      throw ParseError(ParseError::Kind::InvalidStructure, type + " block does not take statement inputs");
    }

    static const std::map<std::string_view, RelDir> moves = {
      {blocks::kMoveForward, RelDir::Forward},
      {blocks::kMoveBackward, RelDir::Backward},
      {blocks::kMoveLeft, RelDir::Left},
      {blocks::kMoveRight, RelDir::Right},
    };
    if (auto it = moves.find(type); it != moves.end()) {
      return {Move{it->second, positive_number(parts, type, "SPEED"), positive_number(parts, type, "DURATION")}};
    }
    if (type == blocks::kTurnLeft || type == blocks::kTurnRight) {
      const auto degrees = integer(parts, type, "DEGREES");
      if (degrees != 90 && degrees != 180) {
        throw ParseError(ParseError::Kind::MissingField, type + " DEGREES must be 90 or 180");
      }
      return {Turn{type == blocks::kTurnLeft ? Side::Left : Side::Right, static_cast<int>(degrees)}};
    }
    if (type == blocks::kMoveKnight) {
      KnightMove k;
      auto side = parse_side(field(parts, type, "DIR_X"));
      if (!side) throw ParseError(ParseError::Kind::MissingField, "move_knight DIR_X must be left or right");
      k.dir_x = *side;
      const auto dir_y = lower(field(parts, type, "DIR_Y"));
      if (dir_y == "forward") k.dir_y = KnightDirY::Forward;
      else if (dir_y == "backward") k.dir_y = KnightDirY::Backward;
      else throw ParseError(ParseError::Kind::MissingField, "move_knight DIR_Y must be forward or backward");
      k.steps_x = static_cast<int>(std::min<std::int64_t>(non_negative(parts, type, "STEPS_X"), 1 << 20));
      k.steps_y = static_cast<int>(std::min<std::int64_t>(non_negative(parts, type, "STEPS_Y"), 1 << 20));
      if (auto it = parts.fields.find("LEG_ORDER"); it != parts.fields.end() && !it->second.empty()) {
        const auto order = lower(it->second);
        if (order == "x-first" || order == "x_first" || order == "x") k.leg_order = LegOrder::XFirst;
        else if (order == "y-first" || order == "y_first" || order == "y") k.leg_order = LegOrder::YFirst;
        else throw ParseError(ParseError::Kind::MissingField, "move_knight LEG_ORDER must be x-first or y-first");
      }
      return {k};
    }
    if (type == blocks::kPickItem) return {Pick{field(parts, type, "ITEM")}};
    if (type == blocks::kPlaceItem) return {Place{}};
    if (type == blocks::kRepeat) {
      RepeatLoop loop;
      loop.times = non_negative(parts, type, "TIMES");
      for (const auto & [name, el] : parts.statements) {
        if (name != "DO") throw ParseError(ParseError::Kind::InvalidStructure, "repeat block has no input " + name);
        if (const auto * first = inner_block(*el)) loop.body = read_chain(*first);
      }
      return {std::move(loop)};
    }
    if (type == blocks::kProcCall) {
      std::string name;
      if (parts.mutation_name && !parts.mutation_name->empty()) name = *parts.mutation_name;
      else if (auto it = parts.fields.find("NAME"); it != parts.fields.end()) name = it->second;
      if (name.empty()) throw ParseError(ParseError::Kind::MissingField, "procedure call without a name");
      return {ProcCall{std::move(name)}};
    }
    throw ParseError(ParseError::Kind::UnknownBlockType, "unknown block type '" + type + "'");
  }

  const BlockCatalog & catalog_;
};

class BlockWriter
{
public:
  std::string write(const BlockProgram & p)
  {
    if (p.procedures.empty() && p.main.empty()) {
      return "<xml xmlns=\"https://developers.google.com/blockly/xml\"/>\n";
    }
    out_ = "<xml xmlns=\"https://developers.google.com/blockly/xml\">\n";
    for (const auto & [name, body] : p.procedures) {
      open(1, "<block type=\"" + std::string(blocks::kProcDef) + "\">");
      field(2, "NAME", name);
      if (!body.empty()) {
        open(2, "<statement name=\"STACK\">");
        chain(3, body, 0);
        open(2, "</statement>");
      }
      open(1, "</block>");
    }
    if (!p.main.empty()) chain(1, p.main, 0);
    out_ += "</xml>\n";
    return std::move(out_);
  }

private:
  void open(int depth, const std::string & line)
  {
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    out_ += line;
    out_ += '\n';
  }

  void field(int depth, std::string_view name, std::string_view value)
  {
    open(depth, "<field name=\"" + std::string(name) + "\">" + xml::escape(value) + "</field>");
  }

  // Emits list[index..] as a <next>-linked chain starting at `depth`.
  void chain(int depth, const StatementList & list, std::size_t index)
  {
    const auto & s = list[index];
    if (std::holds_alternative<Place>(s.node) && index + 1 == list.size()) {
      open(depth, "<block type=\"" + std::string(block_type(s)) + "\"/>");
      return;
    }
    open(depth, "<block type=\"" + std::string(block_type(s)) + "\">");
    body(depth + 1, s);
    if (index + 1 < list.size()) {
      open(depth + 1, "<next>");
      chain(depth + 2, list, index + 1);
      open(depth + 1, "</next>");
    }
    open(depth, "</block>");
  }

  void body(int depth, const Statement & s)
  {
    if (const auto * m = std::get_if<Move>(&s.node)) {
      field(depth, "SPEED", format_number(m->speed));
      field(depth, "DURATION", format_number(m->duration));
    } else if (const auto * t = std::get_if<Turn>(&s.node)) {
      field(depth, "DEGREES", std::to_string(t->degrees));
    } else if (const auto * k = std::get_if<KnightMove>(&s.node)) {
      field(depth, "DIR_X", to_string(k->dir_x));
      field(depth, "DIR_Y", k->dir_y == KnightDirY::Forward ? "forward" : "backward");
      field(depth, "STEPS_X", std::to_string(k->steps_x));
      field(depth, "STEPS_Y", std::to_string(k->steps_y));
      field(depth, "LEG_ORDER", k->leg_order == LegOrder::XFirst ? "x-first" : "y-first");
    } else if (const auto * pick = std::get_if<Pick>(&s.node)) {
      field(depth, "ITEM", pick->item);
    } else if (const auto * loop = std::get_if<RepeatLoop>(&s.node)) {
      field(depth, "TIMES", std::to_string(loop->times));
      if (!loop->body.empty()) {
        open(depth, "<statement name=\"DO\">");
        chain(depth + 1, loop->body, 0);
        open(depth, "</statement>");
      }
    } else if (const auto * call = std::get_if<ProcCall>(&s.node)) {
      open(depth, "<mutation name=\"" + xml::escape(call->name, true) + "\"/>");
    }
  }

  std::string out_;
};

void validate_list(
  const StatementList & list, const std::string & prefix, const BlockCatalog & catalog,
  const std::map<std::string, StatementList> & procs, std::vector<ValidationIssue> & issues)
{
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto & s = list[i];
    const auto type = std::string(block_type(s));
    const auto where = prefix + "[" + std::to_string(i) + "]";
    auto report = [&](std::string msg) { issues.push_back({where, type, std::move(msg)}); };

    if (!catalog.admits(type)) report("block '" + type + "' is not available for this task");

    if (const auto * m = std::get_if<Move>(&s.node)) {
      if (!std::isfinite(m->speed) || m->speed <= 0.0) report("SPEED must be a positive number");
      if (!std::isfinite(m->duration) || m->duration <= 0.0) report("DURATION must be a positive number");
    } else if (const auto * t = std::get_if<Turn>(&s.node)) {
      if (t->degrees != 90 && t->degrees != 180) report("DEGREES must be 90 or 180");
    } else if (const auto * k = std::get_if<KnightMove>(&s.node)) {
      if (k->steps_x < 0 || k->steps_y < 0) report("knight step counts must not be negative");
    } else if (const auto * pick = std::get_if<Pick>(&s.node)) {
      if (pick->item.empty()) report("ITEM must name an item");
    } else if (const auto * loop = std::get_if<RepeatLoop>(&s.node)) {
      if (loop->times < 0) report("TIMES must not be negative");
      validate_list(loop->body, where + ".body", catalog, procs, issues);
    } else if (const auto * call = std::get_if<ProcCall>(&s.node)) {
      if (!procs.count(call->name)) report("call to undefined procedure '" + call->name + "'");
    }
  }
}

}  // namespace

BlockProgram parse_program(std::string_view xml_text, const BlockCatalog & catalog)
{
  xml::Element root;
  try {
    root = xml::parse(xml_text);
  } catch (const xml::SyntaxError & e) {
    throw ParseError(ParseError::Kind::XmlMalformed, e.what());
  }
  return BlockReader(catalog).read(root);
}

std::string serialize_program(const BlockProgram & p) { return BlockWriter{}.write(p); }

ValidationReport validate_program(const BlockProgram & p, const BlockCatalog & catalog)
{
  ValidationReport report;
  if (!p.procedures.empty() && !catalog.admits(blocks::kProcDef)) {
    report.issues.push_back(
      {"procedures", std::string(blocks::kProcDef), "procedure definitions are not available for this task"});
  }
  for (const auto & [name, body] : p.procedures) {
    validate_list(body, "proc " + name, catalog, p.procedures, report.issues);
  }
  validate_list(p.main, "main", catalog, p.procedures, report.issues);
  for (const auto & name : recursive_procedures(p.procedures)) {
    report.issues.push_back({"proc " + name, std::string(blocks::kProcDef), "procedure '" + name + "' calls itself"});
  }
  return report;
}

}  // namespace gridblock
