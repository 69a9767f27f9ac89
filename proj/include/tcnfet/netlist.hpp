/*!
  \file netlist.hpp
  \brief Hierarchical netlist model, text format and elaboration

  The text format is line oriented.  `#` starts a comment.

  \verbatim
  .supply 0.9
  .subckt nti IN OUT
  M1 OUT IN VDD P (10,0)
  M2 OUT IN GND N (19,0)
  .ends
  .subckt top A B Y
  X1 nti A Y
  B1 MUX3 A B GND VDD Y
  .ends
  .top top
  \endverbatim

  `VDD` and `GND` are global rails and may not be used as port names.
*/

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "device.hpp"

namespace tcnfet
{

inline constexpr std::string_view vdd_name = "VDD";
inline constexpr std::string_view gnd_name = "GND";
inline constexpr double default_supply = 0.9;

inline bool is_rail_name( std::string_view name ) { return name == vdd_name || name == gnd_name; }

/*! \brief Behavioral blocks that stand in for cells without published internals. */
enum class macro_function
{
  tfa,    /*!< ternary full adder: a b cin sum cout */
  binbuf, /*!< binary buffer 0/2 -> 0/1: in out */
  ctrl1,  /*!< ALU control decoders: s0 s1 c */
  ctrl2,
  ctrl3,
  ctrl4,
  mux3 /*!< ternary multiplexer: sel in0 in1 in2 out */
};

struct macro_info
{
  macro_function function;
  std::string_view keyword;
  std::size_t inputs;
  std::size_t outputs;

  std::size_t arity() const { return inputs + outputs; }
};

/* pins are ordered inputs first, then outputs */
inline constexpr macro_info macro_table[] = {
    { macro_function::tfa, "TFA", 3, 2 },
    { macro_function::binbuf, "BINBUF", 1, 1 },
    { macro_function::ctrl1, "CTRL1", 2, 1 },
    { macro_function::ctrl2, "CTRL2", 2, 1 },
    { macro_function::ctrl3, "CTRL3", 2, 1 },
    { macro_function::ctrl4, "CTRL4", 2, 1 },
    { macro_function::mux3, "MUX3", 4, 1 },
};

inline macro_info const& info( macro_function f )
{
  for ( auto const& m : macro_table )
    if ( m.function == f )
      return m;
  throw std::logic_error( "unknown macro function" );
}

inline std::optional<macro_function> macro_from_keyword( std::string_view kw )
{
  for ( auto const& m : macro_table )
    if ( m.keyword == kw )
      return m.function;
  return std::nullopt;
}

struct device_statement
{
  std::string name; /* includes the leading 'M' */
  device_kind kind{ device_kind::n };
  std::string drain, gate, source;
  chirality tube;

  bool operator==( device_statement const& ) const = default;
};

struct instance_statement
{
  std::string name; /* includes the leading 'X' */
  std::string cell;
  std::vector<std::string> nodes;

  bool operator==( instance_statement const& ) const = default;
};

struct macro_statement
{
  std::string name; /* includes the leading 'B' */
  macro_function function{ macro_function::tfa };
  std::vector<std::string> nodes;

  bool operator==( macro_statement const& ) const = default;
};

struct subcircuit
{
  std::string name;
  std::vector<std::string> ports;
  std::vector<device_statement> devices;
  std::vector<instance_statement> instances;
  std::vector<macro_statement> macros;

  bool operator==( subcircuit const& ) const = default;
};

struct netlist
{
  std::vector<subcircuit> subcircuits;
  std::string top;
  double vdd{ default_supply };

  subcircuit const* find( std::string_view name ) const
  {
    for ( auto const& s : subcircuits )
      if ( s.name == name )
        return &s;
    return nullptr;
  }

  bool operator==( netlist const& ) const = default;
};

/*! \brief Syntax or structural error with a 1-based source position. */
class parse_error : public std::runtime_error
{
public:
  parse_error( std::size_t line, std::size_t column, std::string const& message )
      : std::runtime_error( "line " + std::to_string( line ) + ", column " + std::to_string( column ) + ": " + message ),
        line_( line ), column_( column ), message_( message )
  {
  }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  std::string const& message() const { return message_; }

private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

class elaboration_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace detail
{

struct token
{
  std::string_view text;
  std::size_t column;
};

inline std::vector<token> tokenize( std::string_view line )
{
  if ( auto const hash = line.find( '#' ); hash != std::string_view::npos )
    line = line.substr( 0, hash );

  std::vector<token> tokens;
  std::size_t i = 0;
  while ( i < line.size() )
  {
    while ( i < line.size() && ( line[i] == ' ' || line[i] == '\t' || line[i] == '\r' ) )
      ++i;
    std::size_t const start = i;
    while ( i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' )
      ++i;
    if ( i > start )
      tokens.push_back( { line.substr( start, i - start ), start + 1 } );
  }
  return tokens;
}

inline bool is_identifier( std::string_view s )
{
  if ( s.empty() )
    return false;
  return std::all_of( s.begin(), s.end(), []( char c ) {
    return ( c >= 'a' && c <= 'z' ) || ( c >= 'A' && c <= 'Z' ) || ( c >= '0' && c <= '9' ) || c == '_';
  } );
}

inline std::optional<int> parse_index( std::string_view s )
{
  int v = 0;
  auto const [ptr, ec] = std::from_chars( s.data(), s.data() + s.size(), v );
  if ( ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || v < 0 )
    return std::nullopt;
  return v;
}

/* "(n,m)" with no embedded blanks */
inline std::optional<std::pair<int, int>> parse_chirality( std::string_view s )
{
  if ( s.size() < 5 || s.front() != '(' || s.back() != ')' )
    return std::nullopt;
  auto const body = s.substr( 1, s.size() - 2 );
  auto const comma = body.find( ',' );
  if ( comma == std::string_view::npos )
    return std::nullopt;
  auto const n = parse_index( body.substr( 0, comma ) );
  auto const m = parse_index( body.substr( comma + 1 ) );
  if ( !n || !m )
    return std::nullopt;
  return std::pair{ *n, *m };
}

inline std::string format_double( double v )
{
  char buf[64];
  auto const [ptr, ec] = std::to_chars( buf, buf + sizeof( buf ), v );
  return std::string( buf, ptr );
}

} // namespace detail

/*! \brief Parses netlist text.

  Throws `parse_error` on malformed input.  Instance references are not
  resolved here; `elaborate` does that.
*/
inline netlist parse_netlist( std::string_view text )
{
  using detail::token;

  netlist result;
  std::optional<subcircuit> open;
  std::size_t open_line = 0;
  bool supply_seen = false;
  struct top_declaration
  {
    std::string name;
    std::size_t line, column;
  };
  std::optional<top_declaration> top_decl;
  std::set<std::string> names_in_cell;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while ( pos <= text.size() )
  {
    auto const eol = text.find( '\n', pos );
    auto const line = text.substr( pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos );
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    auto const tokens = detail::tokenize( line );
    if ( tokens.empty() )
      continue;

    auto fail = [&]( token const& t, std::string const& msg ) -> parse_error { return parse_error( line_no, t.column, msg ); };
    auto const& head = tokens.front();

    auto require_node = [&]( token const& t ) {
      if ( !detail::is_identifier( t.text ) )
        throw fail( t, "invalid node name '" + std::string( t.text ) + "'" );
      return std::string( t.text );
    };
    auto require_open = [&]() {
      if ( !open )
        throw fail( head, "statement outside of .subckt" );
    };
    auto claim_name = [&]() {
      std::string name( head.text );
      if ( !names_in_cell.insert( name ).second )
        throw fail( head, "duplicate statement name '" + name + "'" );
      return name;
    };

    if ( head.text == ".supply" )
    {
      if ( supply_seen )
        throw fail( head, "duplicate .supply" );
      if ( open || !result.subcircuits.empty() )
        throw fail( head, ".supply must precede all cells" );
      if ( tokens.size() != 2 )
        throw fail( head, ".supply expects one value" );
      double v = 0.0;
      auto const s = tokens[1].text;
      auto const [ptr, ec] = std::from_chars( s.data(), s.data() + s.size(), v );
      if ( ec != std::errc{} || ptr != s.data() + s.size() || !( v > 0.0 ) )
        throw fail( tokens[1], "invalid supply voltage '" + std::string( s ) + "'" );
      result.vdd = v;
      supply_seen = true;
    }
    else if ( head.text == ".subckt" )
    {
      if ( open )
        throw fail( head, "nested .subckt (missing .ends for '" + open->name + "')" );
      if ( tokens.size() < 2 )
        throw fail( head, ".subckt expects a name" );
      if ( !detail::is_identifier( tokens[1].text ) )
        throw fail( tokens[1], "invalid cell name '" + std::string( tokens[1].text ) + "'" );
      if ( result.find( tokens[1].text ) )
        throw fail( tokens[1], "duplicate subcircuit '" + std::string( tokens[1].text ) + "'" );
      open = subcircuit{};
      open->name = std::string( tokens[1].text );
      open_line = line_no;
      names_in_cell.clear();
      for ( std::size_t i = 2; i < tokens.size(); ++i )
      {
        auto port = require_node( tokens[i] );
        if ( is_rail_name( port ) )
          throw fail( tokens[i], "rail '" + port + "' cannot be a port" );
        if ( std::find( open->ports.begin(), open->ports.end(), port ) != open->ports.end() )
          throw fail( tokens[i], "duplicate port '" + port + "'" );
        open->ports.push_back( std::move( port ) );
      }
    }
    else if ( head.text == ".ends" )
    {
      require_open();
      if ( tokens.size() != 1 )
        throw fail( tokens[1], "unexpected token after .ends" );
      result.subcircuits.push_back( std::move( *open ) );
      open.reset();
    }
    else if ( head.text == ".top" )
    {
      if ( open )
        throw fail( head, ".top inside .subckt" );
      if ( top_decl )
        throw fail( head, "duplicate .top" );
      if ( tokens.size() != 2 )
        throw fail( head, ".top expects one cell name" );
      top_decl = top_declaration{ std::string( tokens[1].text ), line_no, tokens[1].column };
    }
    else if ( head.text.size() > 1 && head.text[0] == 'M' )
    {
      require_open();
      if ( tokens.size() != 6 )
        throw fail( head, "transistor expects: M<id> <drain> <gate> <source> <P|N> (<n>,<m>)" );
      device_statement d;
      d.name = claim_name();
      d.drain = require_node( tokens[1] );
      d.gate = require_node( tokens[2] );
      d.source = require_node( tokens[3] );
      if ( tokens[4].text == "P" )
        d.kind = device_kind::p;
      else if ( tokens[4].text == "N" )
        d.kind = device_kind::n;
      else
        throw fail( tokens[4], "device kind must be P or N" );
      auto const pair = detail::parse_chirality( tokens[5].text );
      if ( !pair )
        throw fail( tokens[5], "unknown chirality pair format '" + std::string( tokens[5].text ) + "'" );
      try
      {
        d.tube = chirality{ pair->first, pair->second };
      }
      catch ( std::invalid_argument const& e )
      {
        throw fail( tokens[5], e.what() );
      }
      if ( cnt_is_metallic( d.tube ) )
        throw fail( tokens[5], "metallic nanotube " + d.tube.to_string() + " cannot form a transistor channel" );
      open->devices.push_back( std::move( d ) );
    }
    else if ( head.text.size() > 1 && head.text[0] == 'X' )
    {
      require_open();
      if ( tokens.size() < 2 )
        throw fail( head, "instance expects: X<id> <subckt-name> <node>..." );
      instance_statement x;
      x.name = claim_name();
      if ( !detail::is_identifier( tokens[1].text ) )
        throw fail( tokens[1], "invalid cell name '" + std::string( tokens[1].text ) + "'" );
      x.cell = std::string( tokens[1].text );
      for ( std::size_t i = 2; i < tokens.size(); ++i )
        x.nodes.push_back( require_node( tokens[i] ) );
      open->instances.push_back( std::move( x ) );
    }
    else if ( head.text.size() > 1 && head.text[0] == 'B' )
    {
      require_open();
      if ( tokens.size() < 2 )
        throw fail( head, "macro expects: B<id> <function> <node>..." );
      macro_statement b;
      b.name = claim_name();
      auto const fn = macro_from_keyword( tokens[1].text );
      if ( !fn )
        throw fail( tokens[1], "unknown macro function '" + std::string( tokens[1].text ) + "'" );
      b.function = *fn;
      for ( std::size_t i = 2; i < tokens.size(); ++i )
        b.nodes.push_back( require_node( tokens[i] ) );
      if ( b.nodes.size() != info( *fn ).arity() )
        throw fail( head, std::string( info( *fn ).keyword ) + " expects " + std::to_string( info( *fn ).arity() ) + " nodes, got " +
                              std::to_string( b.nodes.size() ) );
      open->macros.push_back( std::move( b ) );
    }
    else
    {
      throw fail( head, "unrecognized statement '" + std::string( head.text ) + "'" );
    }
  }

  if ( open )
    throw parse_error( open_line, 1, "missing .ends for '" + open->name + "'" );

  if ( top_decl )
  {
    if ( !result.find( top_decl->name ) )
      throw parse_error( top_decl->line, top_decl->column, "top cell '" + top_decl->name + "' is not defined" );
    result.top = top_decl->name;
  }
  else if ( !result.subcircuits.empty() )
  {
    result.top = result.subcircuits.back().name;
  }
  else
  {
    throw parse_error( line_no == 0 ? 1 : line_no, 1, "no top cell" );
  }
  return result;
}

/*! \brief Writes a netlist in canonical form; `parse_netlist` inverts it. */
inline std::string to_text( netlist const& n )
{
  std::ostringstream os;
  os << ".supply " << detail::format_double( n.vdd ) << "\n";
  for ( auto const& s : n.subcircuits )
  {
    os << "\n.subckt " << s.name;
    for ( auto const& p : s.ports )
      os << ' ' << p;
    os << '\n';
    for ( auto const& d : s.devices )
      os << d.name << ' ' << d.drain << ' ' << d.gate << ' ' << d.source << ' ' << to_char( d.kind ) << ' ' << d.tube.to_string() << '\n';
    for ( auto const& x : s.instances )
    {
      os << x.name << ' ' << x.cell;
      for ( auto const& node : x.nodes )
        os << ' ' << node;
      os << '\n';
    }
    for ( auto const& b : s.macros )
    {
      os << b.name << ' ' << info( b.function ).keyword;
      for ( auto const& node : b.nodes )
        os << ' ' << node;
      os << '\n';
    }
    os << ".ends\n";
  }
  os << "\n.top " << n.top << '\n';
  return os.str();
}

/* elaborated form */

using node_id = std::uint32_t;

struct flat_device
{
  std::string name; /* hierarchical, e.g. X1/M2 */
  cnfet_params params;
  node_id drain, gate, source;
};

struct flat_macro
{
  std::string name;
  macro_function function;
  std::vector<node_id> pins;

  std::size_t input_count() const { return info( function ).inputs; }
};

/*! \brief Transistor graph of a fully expanded cell.

  Node 0 is VDD and node 1 is GND.  Top-level ports keep their names;
  everything below an instance is prefixed with the instance path
  joined by '/'.  A port that is touched by a device channel or a macro
  output counts as an output, every other port as an input.
*/
struct flat_circuit
{
  std::string name;
  double supply{ default_supply };
  std::vector<std::string> node_names;
  std::vector<node_id> ports;
  std::vector<node_id> inputs;
  std::vector<node_id> outputs;
  std::vector<flat_device> devices;
  std::vector<flat_macro> macros;

  static constexpr node_id vdd = 0;
  static constexpr node_id gnd = 1;

  std::size_t node_count() const { return node_names.size(); }
  bool is_rail( node_id n ) const { return n == vdd || n == gnd; }

  std::optional<node_id> find( std::string_view name ) const
  {
    for ( node_id i = 0; i < node_names.size(); ++i )
      if ( node_names[i] == name )
        return i;
    return std::nullopt;
  }

  node_id at( std::string_view name ) const
  {
    if ( auto id = find( name ) )
      return *id;
    throw std::out_of_range( "no node named '" + std::string( name ) + "'" );
  }
};

namespace detail
{

class elaborator
{
public:
  explicit elaborator( netlist const& n ) : net_( n ) {}

  flat_circuit run( std::string const& top_name )
  {
    auto const* top = net_.find( top_name );
    if ( !top )
      throw elaboration_error( "unresolved top cell '" + top_name + "'" );

    flat_.name = top->name;
    flat_.supply = net_.vdd;
    intern( std::string( vdd_name ) );
    intern( std::string( gnd_name ) );

    std::map<std::string, node_id> binding;
    for ( auto const& p : top->ports )
    {
      auto const id = intern( p );
      binding[p] = id;
      flat_.ports.push_back( id );
    }
    expand( *top, "", binding );

    std::vector<bool> driven( flat_.node_count(), false );
    for ( auto const& d : flat_.devices )
      driven[d.drain] = driven[d.source] = true;
    for ( auto const& m : flat_.macros )
      for ( std::size_t i = m.input_count(); i < m.pins.size(); ++i )
        driven[m.pins[i]] = true;
    for ( auto const p : flat_.ports )
      ( driven[p] ? flat_.outputs : flat_.inputs ).push_back( p );
    return std::move( flat_ );
  }

private:
  node_id intern( std::string const& name )
  {
    auto [it, inserted] = ids_.try_emplace( name, static_cast<node_id>( flat_.node_names.size() ) );
    if ( inserted )
      flat_.node_names.push_back( name );
    return it->second;
  }

  node_id resolve( std::string const& local, std::string const& prefix, std::map<std::string, node_id> const& binding )
  {
    if ( local == vdd_name )
      return flat_circuit::vdd;
    if ( local == gnd_name )
      return flat_circuit::gnd;
    if ( auto it = binding.find( local ); it != binding.end() )
      return it->second;
    return intern( prefix + local );
  }

  void expand( subcircuit const& cell, std::string const& prefix, std::map<std::string, node_id> const& binding )
  {
    if ( std::find( stack_.begin(), stack_.end(), cell.name ) != stack_.end() )
    {
      std::string chain;
      for ( auto const& s : stack_ )
        chain += s + " -> ";
      throw elaboration_error( "instantiation cycle: " + chain + cell.name );
    }
    stack_.push_back( cell.name );

    for ( auto const& d : cell.devices )
    {
      flat_.devices.push_back( { prefix + d.name, cnfet_params::nominal( d.kind, d.tube ), resolve( d.drain, prefix, binding ),
                                 resolve( d.gate, prefix, binding ), resolve( d.source, prefix, binding ) } );
    }
    for ( auto const& b : cell.macros )
    {
      flat_macro m{ prefix + b.name, b.function, {} };
      for ( auto const& node : b.nodes )
        m.pins.push_back( resolve( node, prefix, binding ) );
      flat_.macros.push_back( std::move( m ) );
    }
    for ( auto const& x : cell.instances )
    {
      auto const* sub = net_.find( x.cell );
      if ( !sub )
        throw elaboration_error( "unresolved reference to cell '" + x.cell + "' in " + prefix + x.name );
      if ( sub->ports.size() != x.nodes.size() )
        throw elaboration_error( "instance " + prefix + x.name + " binds " + std::to_string( x.nodes.size() ) + " nodes but '" + x.cell +
                                 "' has " + std::to_string( sub->ports.size() ) + " ports" );
      std::map<std::string, node_id> inner;
      for ( std::size_t i = 0; i < sub->ports.size(); ++i )
        inner[sub->ports[i]] = resolve( x.nodes[i], prefix, binding );
      expand( *sub, prefix + x.name + "/", inner );
    }

    stack_.pop_back();
  }

  netlist const& net_;
  flat_circuit flat_;
  std::map<std::string, node_id> ids_;
  std::vector<std::string> stack_;
};

} // namespace detail

/*! \brief Flattens the hierarchy below `top` (default: the netlist's top cell). */
inline flat_circuit elaborate( netlist const& n, std::string const& top = {} )
{
  return detail::elaborator( n ).run( top.empty() ? n.top : top );
}

struct diagnostic
{
  enum class kind
  {
    floating_gate,
    floating_macro_input,
    undriven_output,
    rail_short,
    driven_rail,
    multiple_macro_drivers
  };

  kind what;
  std::string message;
};

/*! \brief Static connectivity checks; problems are returned, not thrown. */
inline std::vector<diagnostic> validate( flat_circuit const& f )
{
  std::vector<diagnostic> out;
  auto const& names = f.node_names;

  /* nodes reachable from any source through device channels, ignoring gate state */
  std::vector<std::vector<node_id>> adj( f.node_count() );
  for ( auto const& d : f.devices )
  {
    adj[d.drain].push_back( d.source );
    adj[d.source].push_back( d.drain );
  }
  std::vector<bool> reach( f.node_count(), false );
  std::vector<node_id> work{ flat_circuit::vdd, flat_circuit::gnd };
  for ( auto const i : f.inputs )
    work.push_back( i );
  std::vector<std::size_t> macro_drivers( f.node_count(), 0 );
  for ( auto const& m : f.macros )
    for ( std::size_t i = m.input_count(); i < m.pins.size(); ++i )
    {
      work.push_back( m.pins[i] );
      ++macro_drivers[m.pins[i]];
    }
  for ( auto const n : work )
    reach[n] = true;
  while ( !work.empty() )
  {
    auto const n = work.back();
    work.pop_back();
    for ( auto const next : adj[n] )
      if ( !reach[next] )
      {
        reach[next] = true;
        work.push_back( next );
      }
  }

  std::set<node_id> reported;
  for ( auto const& d : f.devices )
  {
    if ( !reach[d.gate] && reported.insert( d.gate ).second )
      out.push_back( { diagnostic::kind::floating_gate, "floating gate: node " + names[d.gate] + " drives " + d.name + " but has no driver" } );

    bool const spans_rails = ( d.drain == flat_circuit::vdd && d.source == flat_circuit::gnd ) ||
                             ( d.drain == flat_circuit::gnd && d.source == flat_circuit::vdd );
    node_id const off_rail = d.params.kind == device_kind::n ? flat_circuit::gnd : flat_circuit::vdd;
    if ( spans_rails && d.gate != off_rail )
      out.push_back( { diagnostic::kind::rail_short, "potential rail short: " + d.name + " connects VDD to GND" } );
  }
  for ( auto const& m : f.macros )
  {
    for ( std::size_t i = 0; i < m.input_count(); ++i )
      if ( !reach[m.pins[i]] && reported.insert( m.pins[i] ).second )
        out.push_back( { diagnostic::kind::floating_macro_input, "floating macro input: node " + names[m.pins[i]] + " of " + m.name } );
    for ( std::size_t i = m.input_count(); i < m.pins.size(); ++i )
      if ( f.is_rail( m.pins[i] ) )
        out.push_back( { diagnostic::kind::driven_rail, "multi-driven rail: " + m.name + " drives " + names[m.pins[i]] } );
  }
  for ( node_id n = 0; n < f.node_count(); ++n )
    if ( !f.is_rail( n ) && macro_drivers[n] > 1 )
      out.push_back( { diagnostic::kind::multiple_macro_drivers, "node " + names[n] + " is driven by " + std::to_string( macro_drivers[n] ) + " macros" } );
  for ( auto const o : f.outputs )
    if ( !reach[o] )
      out.push_back( { diagnostic::kind::undriven_output, "output " + names[o] + " has no potential driver" } );
  return out;
}

} // namespace tcnfet
