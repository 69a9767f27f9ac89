/*!
  \file sim.hpp
  \brief Switch-level steady-state solver and the analyses built on it

  Transistors are threshold-controlled switches.  A node takes the
  voltage of the sources (rails, primary inputs, macro outputs) it can
  reach through conducting channels; when it reaches sources at different
  levels all drivers are taken to be of equal strength and the node sits
  at the midpoint, which yields VDD/2 for a simultaneous pull-up and
  pull-down.  A node that reaches no source is floating (HZ).

  The circuit is split into units: one per channel-connected component
  and one per behavioral macro.  Units are visited in topological order
  of their gate/input dependencies and the sweep is repeated until
  nothing changes (Gauss-Seidel).  Unknown gate voltages do not conduct.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "device.hpp"
#include "netlist.hpp"

namespace tcnfet
{

struct solve_config
{
  double vdd{ default_supply };
  std::size_t max_iterations{ 100 };
  double level_tolerance{ 0.05 }; /* fraction of vdd */
  bool strict_hz_inputs{ true };

  void check() const
  {
    if ( !( vdd > 0.0 ) )
      throw std::invalid_argument( "vdd must be positive" );
    if ( max_iterations < 1 )
      throw std::invalid_argument( "max_iterations must be at least 1" );
    if ( !( level_tolerance > 0.0 && level_tolerance < 0.25 ) )
      throw std::invalid_argument( "level_tolerance must lie in (0, 0.25)" );
  }
};

class solve_error : public std::runtime_error
{
public:
  enum class kind
  {
    oscillation,
    contention,
    invalid_level,
    hz_input,
    macro_domain,
    missing_input,
    enumeration_cap
  };

  solve_error( kind k, std::string const& message )
      : std::runtime_error( message ), kind_( k )
  {
  }

  kind what_kind() const { return kind_; }

  /* input tuple being simulated when the error occurred, if any */
  std::vector<trit> const& tuple() const { return tuple_; }

  solve_error with_tuple( std::vector<trit> tuple, std::string const& label ) const
  {
    solve_error e( kind_, label + ": " + what() );
    e.tuple_ = std::move( tuple );
    return e;
  }

private:
  kind kind_;
  std::vector<trit> tuple_;
};

enum class drive_state
{
  driven,
  floating,
  contention
};

struct node_state
{
  double voltage{ 0.0 };
  drive_state drive{ drive_state::floating };

  bool operator==( node_state const& ) const = default;
};

struct solve_result
{
  std::vector<node_state> nodes;
  std::size_t iterations{ 0 };
  std::size_t static_path_count{ 0 };
  std::vector<std::vector<std::size_t>> static_paths; /* device indices, VDD side first */
  std::vector<trit_hz> outputs;                        /* one per flat_circuit::outputs; empty for analog solves */

  bool operator==( solve_result const& ) const = default;
};

/*! \brief Nearest logic level of a driven voltage, or `invalid_level`. */
inline trit classify_voltage( double v, solve_config const& cfg )
{
  double const band = cfg.level_tolerance * cfg.vdd;
  for ( auto const t : trit::all() )
    if ( std::abs( v - t.value() * cfg.vdd / 2.0 ) <= band )
      return t;
  throw solve_error( solve_error::kind::invalid_level,
                     "voltage " + detail::format_double( v ) + " V is outside every logic band at VDD " + detail::format_double( cfg.vdd ) + " V" );
}

inline double level_voltage( trit t, double vdd ) { return t.value() * vdd / 2.0; }

/*! \brief Resolves several tri-state drivers of one net. */
inline trit_hz resolve_bus( std::span<trit_hz const> drivers )
{
  trit_hz out = trit_hz::hz();
  for ( auto const d : drivers )
  {
    if ( d.is_hz() )
      continue;
    if ( !out.is_hz() && out != d )
      throw solve_error( solve_error::kind::contention,
                         std::string( "bus contention between " ) + out.symbol() + " and " + d.symbol() );
    out = d;
  }
  return out;
}

inline trit_hz resolve_bus( std::initializer_list<trit_hz> drivers )
{
  return resolve_bus( std::span<trit_hz const>( drivers.begin(), drivers.size() ) );
}

namespace detail
{

class union_find
{
public:
  explicit union_find( std::size_t n ) : parent_( n ) { std::iota( parent_.begin(), parent_.end(), std::size_t{ 0 } ); }

  std::size_t find( std::size_t x )
  {
    while ( parent_[x] != x )
    {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite( std::size_t a, std::size_t b )
  {
    a = find( a );
    b = find( b );
    if ( a != b )
      parent_[std::max( a, b )] = std::min( a, b );
  }

private:
  std::vector<std::size_t> parent_;
};

/* evaluation of one macro from classified inputs */
struct macro_outcome
{
  std::vector<trit_hz> outputs;
  std::optional<solve_error> error;
};

inline macro_outcome evaluate_macro( flat_macro const& m, std::span<std::optional<trit_hz> const> in, bool strict )
{
  auto const& mi = info( m.function );
  macro_outcome r{ std::vector<trit_hz>( mi.outputs, trit_hz::hz() ), std::nullopt };

  auto fail = [&]( solve_error::kind k, std::string const& msg ) {
    r.error = solve_error( k, m.name + " (" + std::string( mi.keyword ) + "): " + msg );
    std::fill( r.outputs.begin(), r.outputs.end(), trit_hz::hz() );
    return r;
  };
  /* inputs that must carry a logic value */
  auto need = [&]( std::size_t i ) -> std::optional<trit> {
    if ( !in[i] )
      return std::nullopt;
    if ( in[i]->is_hz() )
      return std::nullopt;
    return in[i]->value();
  };
  auto missing = [&]( std::size_t i ) {
    if ( !in[i] )
      return fail( solve_error::kind::invalid_level, "input " + std::to_string( i ) + " is not at a logic level" );
    if ( strict )
      return fail( solve_error::kind::hz_input, "input " + std::to_string( i ) + " is high impedance" );
    return r;
  };

  switch ( m.function )
  {
  case macro_function::tfa:
  {
    for ( std::size_t i = 0; i < 3; ++i )
      if ( !need( i ) )
        return missing( i );
    if ( need( 2 )->value() == 2 )
      return fail( solve_error::kind::macro_domain, "carry-in must be 0 or 1" );
    auto const s = full_add( *need( 0 ), *need( 1 ), *need( 2 ) );
    r.outputs = { s.sum, s.carry };
    return r;
  }
  case macro_function::binbuf:
  {
    if ( !need( 0 ) )
      return missing( 0 );
    if ( need( 0 )->value() == 1 )
      return fail( solve_error::kind::macro_domain, "binary buffer input must be 0 or 2" );
    r.outputs = { trit{ need( 0 )->value() / 2 } };
    return r;
  }
  case macro_function::ctrl1:
  case macro_function::ctrl2:
  case macro_function::ctrl3:
  case macro_function::ctrl4:
  {
    for ( std::size_t i = 0; i < 2; ++i )
      if ( !need( i ) )
        return missing( i );
    auto const c = control_signals( *need( 0 ), *need( 1 ) );
    trit const picked = m.function == macro_function::ctrl1   ? c.c1
                        : m.function == macro_function::ctrl2 ? c.c2
                        : m.function == macro_function::ctrl3 ? c.c3
                                                              : c.c4;
    r.outputs = { picked };
    return r;
  }
  case macro_function::mux3:
  {
    if ( !need( 0 ) )
      return missing( 0 );
    auto const sel = static_cast<std::size_t>( need( 0 )->value() ) + 1;
    if ( !in[sel] )
      return fail( solve_error::kind::invalid_level, "selected input " + std::to_string( sel ) + " is not at a logic level" );
    r.outputs = { *in[sel] };
    return r;
  }
  }
  return r;
}

/*! \brief Circuit analysis shared by every solve of one flat circuit. */
class engine
{
public:
  explicit engine( flat_circuit const& f )
      : f_( f )
  {
    auto const n = f.node_count();
    is_input_.assign( n, false );
    for ( auto const i : f.inputs )
      is_input_[i] = true;
    macro_drivers_.resize( n );
    for ( std::size_t mi = 0; mi < f.macros.size(); ++mi )
    {
      auto const& m = f.macros[mi];
      for ( std::size_t p = m.input_count(); p < m.pins.size(); ++p )
        macro_drivers_[m.pins[p]].push_back( { mi, p - m.input_count() } );
    }

    /* channel-connected components over non-source nodes */
    union_find uf( n );
    for ( auto const& d : f.devices )
      if ( !is_source( d.drain ) && !is_source( d.source ) )
        uf.unite( d.drain, d.source );
    std::vector<std::size_t> comp_of_root( n, npos );
    component_of_.assign( n, npos );
    for ( node_id v = 0; v < n; ++v )
    {
      if ( is_source( v ) )
        continue;
      auto const root = uf.find( v );
      if ( comp_of_root[root] == npos )
      {
        comp_of_root[root] = components_.size();
        components_.emplace_back();
      }
      component_of_[v] = comp_of_root[root];
      components_[component_of_[v]].nodes.push_back( v );
    }
    for ( std::size_t di = 0; di < f.devices.size(); ++di )
    {
      auto const& d = f.devices[di];
      std::size_t c = npos;
      if ( !is_source( d.drain ) )
        c = component_of_[d.drain];
      else if ( !is_source( d.source ) )
        c = component_of_[d.source];
      if ( c != npos )
        components_[c].devices.push_back( di );
    }

    order_units();
  }

  flat_circuit const& circuit() const { return f_; }

  /*! \brief Steady state for the given input voltages (nullopt = HZ). */
  solve_result run( std::span<std::optional<double> const> input_voltages, std::span<cnfet_params const> params, solve_config const& cfg,
                    bool classify ) const
  {
    cfg.check();
    if ( input_voltages.size() != f_.inputs.size() )
      throw solve_error( solve_error::kind::missing_input, "expected " + std::to_string( f_.inputs.size() ) + " input values, got " +
                                                               std::to_string( input_voltages.size() ) );

    auto const n = f_.node_count();
    std::vector<std::optional<double>> volt( n );
    volt[flat_circuit::vdd] = cfg.vdd;
    volt[flat_circuit::gnd] = 0.0;
    for ( std::size_t i = 0; i < f_.inputs.size(); ++i )
      volt[f_.inputs[i]] = input_voltages[i];

    std::vector<std::vector<trit_hz>> macro_out( f_.macros.size() );
    for ( std::size_t mi = 0; mi < f_.macros.size(); ++mi )
      macro_out[mi].assign( info( f_.macros[mi].function ).outputs, trit_hz::hz() );

    std::size_t iterations = 0;
    bool changed = true;
    while ( changed )
    {
      if ( iterations == cfg.max_iterations )
        throw solve_error( solve_error::kind::oscillation,
                           "no steady state after " + std::to_string( cfg.max_iterations ) + " iterations" );
      ++iterations;
      changed = false;
      for ( auto const& u : units_ )
      {
        if ( u.is_macro )
          changed |= eval_macro( u.index, volt, macro_out, cfg );
        else
          changed |= eval_component( u.index, volt, params, cfg );
      }
    }

    /* final consistency checks on the fixpoint */
    for ( std::size_t mi = 0; mi < f_.macros.size(); ++mi )
    {
      auto const outcome = macro_at( mi, volt, cfg );
      if ( outcome.error && !( !cfg.strict_hz_inputs && outcome.error->what_kind() == solve_error::kind::hz_input ) )
        throw *outcome.error;
    }
    for ( node_id v = 0; v < n; ++v )
      if ( !macro_drivers_[v].empty() )
        combine_macro_drivers( v, macro_out, cfg, true );

    std::vector<bool> conducting( f_.devices.size(), false );
    for ( std::size_t di = 0; di < f_.devices.size(); ++di )
    {
      auto const& d = f_.devices[di];
      if ( !volt[d.gate] )
      {
        if ( cfg.strict_hz_inputs )
          throw solve_error( solve_error::kind::hz_input, "gate of " + d.name + " (node " + f_.node_names[d.gate] + ") is high impedance" );
        continue;
      }
      conducting[di] = conducts( params[di], *volt[d.gate], cfg );
    }

    solve_result r;
    r.iterations = iterations;
    r.nodes.resize( n );
    for ( node_id v = 0; v < n; ++v )
      r.nodes[v] = volt[v] ? node_state{ *volt[v], drive_state::driven } : node_state{ 0.0, drive_state::floating };
    r.static_paths = rail_paths( conducting );
    r.static_path_count = r.static_paths.size();
    if ( classify )
    {
      for ( auto const o : f_.outputs )
        r.outputs.push_back( volt[o] ? trit_hz{ classify_voltage( *volt[o], cfg ) } : trit_hz::hz() );
    }
    return r;
  }

private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct component
  {
    std::vector<node_id> nodes;
    std::vector<std::size_t> devices;
  };

  struct unit
  {
    bool is_macro;
    std::size_t index;
  };

  struct macro_pin
  {
    std::size_t macro;
    std::size_t output;
  };

  bool is_source( node_id v ) const { return f_.is_rail( v ) || is_input_[v] || !macro_drivers_[v].empty(); }

  static bool conducts( cnfet_params const& p, double v_gate, solve_config const& cfg )
  {
    return device_conducts( p, v_gate, p.kind == device_kind::n ? 0.0 : cfg.vdd );
  }

  void order_units()
  {
    /* unit ids: components first, then macros */
    auto const nc = components_.size();
    auto const total = nc + f_.macros.size();
    auto producer = [&]( node_id v ) -> std::vector<std::size_t> {
      if ( f_.is_rail( v ) || is_input_[v] )
        return {};
      if ( !macro_drivers_[v].empty() )
      {
        std::vector<std::size_t> ps;
        for ( auto const& mp : macro_drivers_[v] )
          ps.push_back( nc + mp.macro );
        return ps;
      }
      return { component_of_[v] };
    };

    std::vector<std::set<std::size_t>> deps( total );
    for ( std::size_t c = 0; c < nc; ++c )
      for ( auto const di : components_[c].devices )
      {
        auto const& d = f_.devices[di];
        for ( auto const v : { d.gate, d.drain, d.source } )
          for ( auto const p : producer( v ) )
            if ( p != c )
              deps[c].insert( p );
      }
    for ( std::size_t mi = 0; mi < f_.macros.size(); ++mi )
    {
      auto const& m = f_.macros[mi];
      for ( std::size_t i = 0; i < m.input_count(); ++i )
        for ( auto const p : producer( m.pins[i] ) )
          if ( p != nc + mi )
            deps[nc + mi].insert( p );
    }

    std::vector<std::size_t> pending( total );
    std::vector<std::vector<std::size_t>> users( total );
    for ( std::size_t u = 0; u < total; ++u )
    {
      pending[u] = deps[u].size();
      for ( auto const d : deps[u] )
        users[d].push_back( u );
    }
    std::set<std::size_t> ready;
    for ( std::size_t u = 0; u < total; ++u )
      if ( pending[u] == 0 )
        ready.insert( u );
    std::vector<bool> done( total, false );
    while ( units_.size() < total )
    {
      std::size_t u;
      if ( !ready.empty() )
      {
        u = *ready.begin();
        ready.erase( ready.begin() );
      }
      else
      {
        /* feedback loop: break it at the lowest pending unit */
        u = 0;
        while ( done[u] )
          ++u;
      }
      done[u] = true;
      units_.push_back( { u >= nc, u >= nc ? u - nc : u } );
      for ( auto const w : users[u] )
        if ( !done[w] && pending[w] > 0 && --pending[w] == 0 )
          ready.insert( w );
    }
  }

  std::optional<trit_hz> classify_node( std::optional<double> v, solve_config const& cfg ) const
  {
    if ( !v )
      return trit_hz::hz();
    try
    {
      return trit_hz{ classify_voltage( *v, cfg ) };
    }
    catch ( solve_error const& )
    {
      return std::nullopt;
    }
  }

  macro_outcome macro_at( std::size_t mi, std::vector<std::optional<double>> const& volt, solve_config const& cfg ) const
  {
    auto const& m = f_.macros[mi];
    std::vector<std::optional<trit_hz>> in;
    for ( std::size_t i = 0; i < m.input_count(); ++i )
      in.push_back( classify_node( volt[m.pins[i]], cfg ) );
    return evaluate_macro( m, in, cfg.strict_hz_inputs );
  }

  /* returns whether the node changed */
  bool combine_macro_drivers( node_id v, std::vector<std::vector<trit_hz>> const& macro_out, solve_config const& cfg, bool raise,
                              std::vector<std::optional<double>>* volt = nullptr ) const
  {
    std::vector<trit_hz> drivers;
    for ( auto const& mp : macro_drivers_[v] )
      drivers.push_back( macro_out[mp.macro][mp.output] );
    trit_hz value = trit_hz::hz();
    try
    {
      value = resolve_bus( drivers );
    }
    catch ( solve_error const& e )
    {
      if ( raise )
        throw solve_error( e.what_kind(), "node " + f_.node_names[v] + ": " + e.what() );
    }
    if ( !volt )
      return false;
    std::optional<double> nv;
    if ( !value.is_hz() )
      nv = level_voltage( value.value(), cfg.vdd );
    if ( ( *volt )[v] == nv )
      return false;
    ( *volt )[v] = nv;
    return true;
  }

  bool eval_macro( std::size_t mi, std::vector<std::optional<double>>& volt, std::vector<std::vector<trit_hz>>& macro_out,
                   solve_config const& cfg ) const
  {
    auto outcome = macro_at( mi, volt, cfg );
    macro_out[mi] = outcome.outputs;
    bool changed = false;
    auto const& m = f_.macros[mi];
    for ( std::size_t p = m.input_count(); p < m.pins.size(); ++p )
      changed |= combine_macro_drivers( m.pins[p], macro_out, cfg, false, &volt );
    return changed;
  }

  bool eval_component( std::size_t ci, std::vector<std::optional<double>>& volt, std::span<cnfet_params const> params,
                       solve_config const& cfg ) const
  {
    auto const& comp = components_[ci];
    auto const k = comp.nodes.size();
    auto local = [&]( node_id v ) {
      return static_cast<std::size_t>( std::lower_bound( comp.nodes.begin(), comp.nodes.end(), v ) - comp.nodes.begin() );
    };

    union_find uf( k );
    std::vector<std::pair<std::size_t, double>> attach; /* (local node, source voltage) */
    for ( auto const di : comp.devices )
    {
      auto const& d = f_.devices[di];
      if ( !volt[d.gate] || !conducts( params[di], *volt[d.gate], cfg ) )
        continue;
      bool const ds = is_source( d.drain ), ss = is_source( d.source );
      if ( !ds && !ss )
        uf.unite( local( d.drain ), local( d.source ) );
      else if ( ds && !ss && volt[d.drain] )
        attach.emplace_back( local( d.source ), *volt[d.drain] );
      else if ( ss && !ds && volt[d.source] )
        attach.emplace_back( local( d.drain ), *volt[d.source] );
    }

    std::vector<double> lo( k, std::numeric_limits<double>::infinity() );
    std::vector<double> hi( k, -std::numeric_limits<double>::infinity() );
    for ( auto const& [node, v] : attach )
    {
      auto const root = uf.find( node );
      lo[root] = std::min( lo[root], v );
      hi[root] = std::max( hi[root], v );
    }

    bool changed = false;
    for ( std::size_t i = 0; i < k; ++i )
    {
      auto const root = uf.find( i );
      std::optional<double> nv;
      if ( lo[root] <= hi[root] )
        nv = ( lo[root] + hi[root] ) / 2.0;
      if ( volt[comp.nodes[i]] != nv )
      {
        volt[comp.nodes[i]] = nv;
        changed = true;
      }
    }
    return changed;
  }

  /* every simple VDD -> GND path through conducting channels and non-source nodes */
  std::vector<std::vector<std::size_t>> rail_paths( std::vector<bool> const& conducting ) const
  {
    std::vector<std::vector<std::pair<std::size_t, node_id>>> adj( f_.node_count() );
    for ( std::size_t di = 0; di < f_.devices.size(); ++di )
    {
      if ( !conducting[di] )
        continue;
      auto const& d = f_.devices[di];
      adj[d.drain].emplace_back( di, d.source );
      adj[d.source].emplace_back( di, d.drain );
    }
    std::vector<std::vector<std::size_t>> paths;
    std::vector<std::size_t> stack;
    std::vector<bool> on_path( f_.node_count(), false );
    std::function<void( node_id )> dfs = [&]( node_id v ) {
      on_path[v] = true;
      for ( auto const& [di, next] : adj[v] )
      {
        if ( on_path[next] )
          continue;
        stack.push_back( di );
        if ( next == flat_circuit::gnd )
          paths.push_back( stack );
        else if ( !is_source( next ) )
          dfs( next );
        stack.pop_back();
      }
      on_path[v] = false;
    };
    dfs( flat_circuit::vdd );
    return paths;
  }

  flat_circuit const& f_;
  std::vector<bool> is_input_;
  std::vector<std::vector<macro_pin>> macro_drivers_;
  std::vector<std::size_t> component_of_;
  std::vector<component> components_;
  std::vector<unit> units_;
};

inline std::vector<cnfet_params> nominal_params( flat_circuit const& f )
{
  std::vector<cnfet_params> p;
  p.reserve( f.devices.size() );
  for ( auto const& d : f.devices )
    p.push_back( d.params );
  return p;
}

inline std::vector<std::optional<double>> to_voltages( std::span<trit_hz const> in, double vdd )
{
  std::vector<std::optional<double>> v;
  v.reserve( in.size() );
  for ( auto const t : in )
    v.push_back( t.is_hz() ? std::nullopt : std::optional<double>{ level_voltage( t.value(), vdd ) } );
  return v;
}

} // namespace detail

/*! \brief Steady state with inputs given in `f.inputs` order. */
inline solve_result solve( flat_circuit const& f, std::span<trit_hz const> inputs, solve_config const& cfg = {} )
{
  auto const params = detail::nominal_params( f );
  return detail::engine( f ).run( detail::to_voltages( inputs, cfg.vdd ), params, cfg, true );
}

/*! \brief Steady state with inputs given by node name; every input must be assigned. */
inline solve_result solve( flat_circuit const& f, std::map<std::string, trit_hz> const& inputs, solve_config const& cfg = {} )
{
  std::vector<trit_hz> ordered;
  for ( auto const i : f.inputs )
  {
    auto const it = inputs.find( f.node_names[i] );
    if ( it == inputs.end() )
      throw solve_error( solve_error::kind::missing_input, "input " + f.node_names[i] + " is not assigned" );
    ordered.push_back( it->second );
  }
  for ( auto const& [name, value] : inputs )
  {
    auto const id = f.find( name );
    if ( !id || std::find( f.inputs.begin(), f.inputs.end(), *id ) == f.inputs.end() )
      throw solve_error( solve_error::kind::missing_input, "'" + name + "' is not an input of " + f.name );
  }
  return solve( f, ordered, cfg );
}

/*! \brief Steady state for arbitrary input voltages; outputs are not classified. */
inline solve_result solve_voltages( flat_circuit const& f, std::span<std::optional<double> const> inputs, solve_config const& cfg = {} )
{
  auto const params = detail::nominal_params( f );
  return detail::engine( f ).run( inputs, params, cfg, false );
}

/*! \brief Number of VDD-to-GND conducting paths in a solved state. */
inline std::size_t static_power_proxy( solve_result const& r ) { return r.static_path_count; }

/*! \brief Static paths that run through at least one device under `prefix`. */
inline std::size_t static_paths_through( flat_circuit const& f, solve_result const& r, std::string_view prefix )
{
  return static_cast<std::size_t>( std::count_if( r.static_paths.begin(), r.static_paths.end(), [&]( auto const& path ) {
    return std::any_of( path.begin(), path.end(), [&]( std::size_t di ) { return f.devices[di].name.starts_with( prefix ); } );
  } ) );
}

/* exhaustive enumeration */

inline constexpr std::size_t max_table_inputs = 6;

/*! \brief Several flat outputs that share one logical net. */
struct output_group
{
  std::string name;
  std::vector<std::string> drivers;
};

struct table_options
{
  /* per-input value sets; empty means {0,1,2} for every input */
  std::vector<std::vector<trit>> domains;
  /* empty means one group per flat output */
  std::vector<output_group> groups;
};

struct truth_row
{
  std::vector<trit> inputs;
  std::vector<trit_hz> outputs;
  std::size_t static_paths{ 0 };

  bool operator==( truth_row const& ) const = default;
};

struct truth_table_result
{
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  std::vector<truth_row> rows;

  bool operator==( truth_table_result const& ) const = default;
};

namespace detail
{

inline std::string tuple_label( std::vector<std::string> const& names, std::span<trit const> t )
{
  std::string s;
  for ( std::size_t i = 0; i < t.size(); ++i )
    s += ( i ? " " : "" ) + names[i] + "=" + t[i].symbol();
  return s;
}

/* cartesian product, first input most significant */
inline std::vector<std::vector<trit>> enumerate_tuples( std::vector<std::vector<trit>> const& domains )
{
  std::vector<std::vector<trit>> out{ {} };
  for ( auto const& dom : domains )
  {
    std::vector<std::vector<trit>> next;
    for ( auto const& prefix : out )
      for ( auto const t : dom )
      {
        auto row = prefix;
        row.push_back( t );
        next.push_back( std::move( row ) );
      }
    out = std::move( next );
  }
  return out;
}

class table_runner
{
public:
  table_runner( flat_circuit const& f, table_options const& opt )
      : f_( f ), engine_( f )
  {
    if ( f.inputs.size() > max_table_inputs )
      throw solve_error( solve_error::kind::enumeration_cap, f.name + " has " + std::to_string( f.inputs.size() ) +
                                                                 " inputs; enumeration cap is " + std::to_string( max_table_inputs ) );
    domains_ = opt.domains;
    if ( domains_.empty() )
      domains_.assign( f.inputs.size(), { trit{ 0 }, trit{ 1 }, trit{ 2 } } );
    if ( domains_.size() != f.inputs.size() )
      throw std::invalid_argument( "one domain per input expected" );

    for ( auto const i : f.inputs )
      input_names_.push_back( f.node_names[i] );

    auto output_slot = [&]( std::string const& name ) {
      auto const id = f.at( name );
      auto const it = std::find( f.outputs.begin(), f.outputs.end(), id );
      if ( it == f.outputs.end() )
        throw std::invalid_argument( "'" + name + "' is not an output of " + f.name );
      return static_cast<std::size_t>( it - f.outputs.begin() );
    };
    if ( opt.groups.empty() )
    {
      for ( std::size_t k = 0; k < f.outputs.size(); ++k )
      {
        output_names_.push_back( f.node_names[f.outputs[k]] );
        groups_.push_back( { k } );
      }
    }
    for ( auto const& g : opt.groups )
    {
      output_names_.push_back( g.name );
      groups_.emplace_back();
      for ( auto const& d : g.drivers )
        groups_.back().push_back( output_slot( d ) );
    }
  }

  truth_table_result run( std::span<cnfet_params const> params, solve_config const& cfg ) const
  {
    truth_table_result t{ input_names_, output_names_, {} };
    for ( auto const& tuple : enumerate_tuples( domains_ ) )
      t.rows.push_back( row( tuple, params, cfg ) );
    return t;
  }

  truth_row row( std::vector<trit> const& tuple, std::span<cnfet_params const> params, solve_config const& cfg ) const
  {
    try
    {
      std::vector<trit_hz> in( tuple.begin(), tuple.end() );
      auto const r = engine_.run( to_voltages( in, cfg.vdd ), params, cfg, true );
      truth_row out{ tuple, {}, r.static_path_count };
      for ( auto const& g : groups_ )
      {
        std::vector<trit_hz> drivers;
        for ( auto const k : g )
          drivers.push_back( r.outputs[k] );
        out.outputs.push_back( resolve_bus( drivers ) );
      }
      return out;
    }
    catch ( solve_error const& e )
    {
      throw e.with_tuple( tuple, tuple_label( input_names_, tuple ) );
    }
  }

  std::vector<std::string> const& input_names() const { return input_names_; }

private:
  flat_circuit const& f_;
  engine engine_;
  std::vector<std::vector<trit>> domains_;
  std::vector<std::string> input_names_;
  std::vector<std::string> output_names_;
  std::vector<std::vector<std::size_t>> groups_;
};

} // namespace detail

/*! \brief Exhaustive switch-level truth table (at most six inputs). */
inline truth_table_result truth_table( flat_circuit const& f, solve_config const& cfg = {}, table_options const& opt = {} )
{
  auto const params = detail::nominal_params( f );
  return detail::table_runner( f, opt ).run( params, cfg );
}

/*! \brief Truth table as CSV with the symbols 0, 1, 2 and Z. */
inline std::string to_csv( truth_table_result const& t )
{
  std::string s;
  auto header = t.input_names;
  header.insert( header.end(), t.output_names.begin(), t.output_names.end() );
  for ( std::size_t i = 0; i < header.size(); ++i )
    s += ( i ? "," : "" ) + header[i];
  s += '\n';
  for ( auto const& r : t.rows )
  {
    bool first = true;
    for ( auto const v : r.inputs )
    {
      s += first ? "" : ",";
      s += v.symbol();
      first = false;
    }
    for ( auto const v : r.outputs )
    {
      s += ',';
      s += v.symbol();
    }
    s += '\n';
  }
  return s;
}

/* voltage transfer characteristic */

struct vtc_point
{
  double v_in;
  std::optional<double> v_out; /* nullopt when the output floats */

  bool operator==( vtc_point const& ) const = default;
};

/*! \brief Sweeps `pin` uniformly over [0, vdd] in `steps` points. */
inline std::vector<vtc_point> vtc_sweep( flat_circuit const& f, std::string const& pin, std::map<std::string, trit> const& fixed,
                                         std::size_t steps, solve_config const& cfg = {}, std::string const& output = {} )
{
  if ( steps < 2 )
    throw std::invalid_argument( "a sweep needs at least two steps" );
  auto const pin_id = f.at( pin );
  auto const out_id = output.empty() ? ( f.outputs.empty() ? throw std::invalid_argument( f.name + " has no outputs" ) : f.outputs.front() )
                                     : f.at( output );

  std::vector<std::optional<double>> in( f.inputs.size() );
  std::size_t pin_slot = f.inputs.size();
  for ( std::size_t i = 0; i < f.inputs.size(); ++i )
  {
    auto const& name = f.node_names[f.inputs[i]];
    if ( f.inputs[i] == pin_id )
      pin_slot = i;
    else if ( auto it = fixed.find( name ); it != fixed.end() )
      in[i] = level_voltage( it->second, cfg.vdd );
    else
      throw solve_error( solve_error::kind::missing_input, "input " + name + " is neither swept nor fixed" );
  }
  if ( pin_slot == f.inputs.size() )
    throw std::invalid_argument( "'" + pin + "' is not an input of " + f.name );

  /* between logic levels an internal node may float, which only turns its devices off */
  auto sweep_cfg = cfg;
  sweep_cfg.strict_hz_inputs = false;

  auto const params = detail::nominal_params( f );
  detail::engine const eng( f );
  std::vector<vtc_point> series;
  series.reserve( steps );
  for ( std::size_t k = 0; k < steps; ++k )
  {
    double const v = cfg.vdd * static_cast<double>( k ) / static_cast<double>( steps - 1 );
    in[pin_slot] = v;
    auto const r = eng.run( in, params, sweep_cfg, false );
    auto const& ns = r.nodes[out_id];
    series.push_back( { v, ns.drive == drive_state::driven ? std::optional<double>{ ns.voltage } : std::nullopt } );
  }
  return series;
}

inline std::string to_csv( std::vector<vtc_point> const& series )
{
  std::string s = "v_in,v_out\n";
  for ( auto const& p : series )
    s += detail::format_double( p.v_in ) + "," + ( p.v_out ? detail::format_double( *p.v_out ) : std::string( "Z" ) ) + "\n";
  return s;
}

/* Monte-Carlo process variation */

struct mc_cell
{
  std::string name;
  flat_circuit circuit;
  std::function<std::vector<trit_hz>( std::vector<trit> const& )> oracle;
  table_options options;
};

struct mc_cell_report
{
  std::string name;
  std::size_t failures{ 0 };                  /* trials in which this cell mismatched */
  std::set<std::vector<trit>> failing_tuples; /* union over all trials */

  bool operator==( mc_cell_report const& ) const = default;
};

struct mc_report
{
  std::size_t trials{ 0 };
  std::size_t failures{ 0 }; /* trials with any mismatch in any cell */
  std::uint64_t seed{ 0 };
  diameter_perturbation perturbation;
  double vdd{ default_supply };
  std::vector<mc_cell_report> cells;

  bool operator==( mc_report const& o ) const
  {
    return trials == o.trials && failures == o.failures && seed == o.seed && perturbation.sigma_fraction == o.perturbation.sigma_fraction &&
           perturbation.truncation == o.perturbation.truncation && vdd == o.vdd && cells == o.cells;
  }
};

namespace detail
{

/* one independent stream per (trial, cell) so the report does not depend on evaluation order */
inline std::mt19937_64 trial_stream( std::uint64_t seed, std::size_t trial, std::size_t cell )
{
  std::seed_seq seq{ static_cast<std::uint32_t>( seed ), static_cast<std::uint32_t>( seed >> 32 ), static_cast<std::uint32_t>( trial ),
                     static_cast<std::uint32_t>( cell ) };
  return std::mt19937_64( seq );
}

} // namespace detail

/*! \brief Re-runs every cell's truth table with independently perturbed tube diameters. */
inline mc_report monte_carlo( std::vector<mc_cell> const& cells, diameter_perturbation const& pert, std::size_t trials, std::uint64_t seed,
                              solve_config const& cfg = {} )
{
  if ( trials < 1 )
    throw std::invalid_argument( "at least one trial is required" );
  pert.check();

  mc_report report;
  report.trials = trials;
  report.seed = seed;
  report.perturbation = pert;
  report.vdd = cfg.vdd;

  std::vector<detail::table_runner> runners;
  std::vector<std::vector<std::vector<trit_hz>>> expected;
  for ( auto const& c : cells )
  {
    runners.emplace_back( c.circuit, c.options );
    report.cells.push_back( { c.name, 0, {} } );
    auto domains = c.options.domains;
    if ( domains.empty() )
      domains.assign( c.circuit.inputs.size(), { trit{ 0 }, trit{ 1 }, trit{ 2 } } );
    auto& exp = expected.emplace_back();
    for ( auto const& tuple : detail::enumerate_tuples( domains ) )
      exp.push_back( c.oracle( tuple ) );
  }

  for ( std::size_t trial = 0; trial < trials; ++trial )
  {
    bool trial_failed = false;
    for ( std::size_t ci = 0; ci < cells.size(); ++ci )
    {
      auto const& f = cells[ci].circuit;
      auto rng = detail::trial_stream( seed, trial, ci );
      std::normal_distribution<double> gauss( 0.0, 1.0 );
      std::vector<cnfet_params> params;
      params.reserve( f.devices.size() );
      for ( auto const& d : f.devices )
      {
        auto const diameter = perturb_diameter( cnt_diameter( d.params.tube ), pert, gauss( rng ) );
        params.push_back( cnfet_params::with_diameter( d.params.kind, d.params.tube, diameter ) );
      }

      auto domains = cells[ci].options.domains;
      if ( domains.empty() )
        domains.assign( f.inputs.size(), { trit{ 0 }, trit{ 1 }, trit{ 2 } } );
      auto const tuples = detail::enumerate_tuples( domains );
      bool cell_failed = false;
      for ( std::size_t k = 0; k < tuples.size(); ++k )
      {
        bool ok = false;
        try
        {
          ok = runners[ci].row( tuples[k], params, cfg ).outputs == expected[ci][k];
        }
        catch ( solve_error const& )
        {
        }
        if ( !ok )
        {
          cell_failed = true;
          report.cells[ci].failing_tuples.insert( tuples[k] );
        }
      }
      if ( cell_failed )
      {
        ++report.cells[ci].failures;
        trial_failed = true;
      }
    }
    if ( trial_failed )
      ++report.failures;
  }
  return report;
}

} // namespace tcnfet
