/*!
  \file stdlib.hpp
  \brief Library cells: tri-state gates, adder/subtractor and the two ALUs

  Every tri-state gate shares one output stage of six transistors:

  \verbatim
    VDD --T1(S=0)-- RA --T2(f>=1)-- OUT --T3(f<=1)-- RB --T4(S=0)-- GND
    GND --T6(S=2)-- RA                               RB --T5(S=2)-- VDD
  \endverbatim

  T2 is a P device gated by NTI(f) and T3 an N device gated by PTI(f),
  where f is the gate's logic function of its data inputs.  For S = 0 the
  virtual rails RA/RB are tied to VDD/GND and OUT follows f; for S = 2
  the rails swap and OUT is the complement; for S = 1 none of T1, T4, T5,
  T6 conducts, RA/RB float and OUT is high impedance.  T4 and T5 are
  gated by NTI(S) and PTI(S).

  All transistors use the (10,0) or (19,0) tube.
*/

#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "device.hpp"
#include "netlist.hpp"
#include "sim.hpp"

namespace tcnfet
{

struct cell_entry
{
  std::string name;
  std::string description;
  netlist net;
  table_options options;
  std::function<std::vector<trit_hz>( std::vector<trit> const& )> oracle;

  flat_circuit flatten() const { return elaborate( net ); }

  truth_table_result simulate( solve_config const& cfg = {} ) const { return truth_table( flatten(), cfg, options ); }

  /*! \brief Oracle rows in the same order `simulate` produces them. */
  truth_table_result expected() const
  {
    auto const f = flatten();
    auto domains = options.domains;
    if ( domains.empty() )
      domains.assign( f.inputs.size(), { trit{ 0 }, trit{ 1 }, trit{ 2 } } );
    truth_table_result t;
    for ( auto const i : f.inputs )
      t.input_names.push_back( f.node_names[i] );
    if ( options.groups.empty() )
      for ( auto const o : f.outputs )
        t.output_names.push_back( f.node_names[o] );
    for ( auto const& g : options.groups )
      t.output_names.push_back( g.name );
    for ( auto const& tuple : detail::enumerate_tuples( domains ) )
      t.rows.push_back( { tuple, oracle( tuple ), 0 } );
    return t;
  }
};

namespace detail
{

inline device_statement mos( std::string name, std::string drain, std::string gate, std::string source, device_kind kind, chirality tube )
{
  return { std::move( name ), kind, std::move( drain ), std::move( gate ), std::move( source ), tube };
}

constexpr auto P = device_kind::p;
constexpr auto N = device_kind::n;

inline subcircuit inverter( std::string name, chirality pull_up, chirality pull_down )
{
  return { std::move( name ), { "IN", "OUT" }, { mos( "M1", "OUT", "IN", "VDD", P, pull_up ), mos( "M2", "OUT", "IN", "GND", N, pull_down ) }, {}, {} };
}

/* NTI: pull-up only for IN = 0, pull-down for IN >= 1 */
inline subcircuit nti_cell() { return inverter( "nti", high_vth_tube, low_vth_tube ); }
/* PTI: pull-up for IN <= 1, pull-down only for IN = 2 */
inline subcircuit pti_cell() { return inverter( "pti", low_vth_tube, high_vth_tube ); }
/* STI: both networks conduct at IN = 1 */
inline subcircuit sti_cell() { return inverter( "sti", low_vth_tube, low_vth_tube ); }

/* the six-transistor output stage; NF = NTI(f), PF = PTI(f) */
inline void output_stage( subcircuit& s, std::string const& sel, std::string const& nf, std::string const& pf, std::string const& out )
{
  s.instances.push_back( { "XNS", "nti", { sel, "NS" } } );
  s.instances.push_back( { "XPS", "pti", { sel, "PS" } } );
  s.devices.push_back( mos( "M1", "RA", sel, "VDD", P, high_vth_tube ) );
  s.devices.push_back( mos( "M2", out, nf, "RA", P, high_vth_tube ) );
  s.devices.push_back( mos( "M3", out, pf, "RB", N, high_vth_tube ) );
  s.devices.push_back( mos( "M4", "RB", "NS", "GND", N, high_vth_tube ) );
  s.devices.push_back( mos( "M5", "RB", "PS", "VDD", P, high_vth_tube ) );
  s.devices.push_back( mos( "M6", "RA", sel, "GND", N, high_vth_tube ) );
}

inline subcircuit buffer_not_cell()
{
  subcircuit s{ "buffer_not", { "S", "IN", "OUT" }, {}, {}, {} };
  s.instances.push_back( { "XN", "nti", { "IN", "NF" } } );
  s.instances.push_back( { "XP", "pti", { "IN", "PF" } } );
  output_stage( s, "S", "NF", "PF", "OUT" );
  return s;
}

/* NTI(min(A,B)): high iff either input is 0 */
inline subcircuit ntnand_cell()
{
  return { "ntnand",
           { "A", "B", "OUT" },
           { mos( "M1", "OUT", "A", "VDD", P, high_vth_tube ), mos( "M2", "OUT", "B", "VDD", P, high_vth_tube ),
             mos( "M3", "OUT", "A", "MID", N, low_vth_tube ), mos( "M4", "MID", "B", "GND", N, low_vth_tube ) },
           {},
           {} };
}

/* PTI(min(A,B)): high iff either input is <= 1 */
inline subcircuit ptnand_cell()
{
  return { "ptnand",
           { "A", "B", "OUT" },
           { mos( "M1", "OUT", "A", "VDD", P, low_vth_tube ), mos( "M2", "OUT", "B", "VDD", P, low_vth_tube ),
             mos( "M3", "OUT", "A", "MID", N, high_vth_tube ), mos( "M4", "MID", "B", "GND", N, high_vth_tube ) },
           {},
           {} };
}

/* NTI(max(A,B)): high iff both inputs are 0 */
inline subcircuit ntnor_cell()
{
  return { "ntnor",
           { "A", "B", "OUT" },
           { mos( "M1", "MID", "A", "VDD", P, high_vth_tube ), mos( "M2", "OUT", "B", "MID", P, high_vth_tube ),
             mos( "M3", "OUT", "A", "GND", N, low_vth_tube ), mos( "M4", "OUT", "B", "GND", N, low_vth_tube ) },
           {},
           {} };
}

/* PTI(max(A,B)): high iff both inputs are <= 1 */
inline subcircuit ptnor_cell()
{
  return { "ptnor",
           { "A", "B", "OUT" },
           { mos( "M1", "MID", "A", "VDD", P, low_vth_tube ), mos( "M2", "OUT", "B", "MID", P, low_vth_tube ),
             mos( "M3", "OUT", "A", "GND", N, high_vth_tube ), mos( "M4", "OUT", "B", "GND", N, high_vth_tube ) },
           {},
           {} };
}

inline subcircuit two_input_gate( std::string name, std::string const& nt, std::string const& pt )
{
  subcircuit s{ std::move( name ), { "S", "A", "B", "OUT" }, {}, {}, {} };
  s.instances.push_back( { "XN", nt, { "A", "B", "NF" } } );
  s.instances.push_back( { "XP", pt, { "A", "B", "PF" } } );
  output_stage( s, "S", "NF", "PF", "OUT" );
  return s;
}

inline subcircuit and_nand_cell() { return two_input_gate( "and_nand", "ntnand", "ptnand" ); }
inline subcircuit or_nor_cell() { return two_input_gate( "or_nor", "ntnor", "ptnor" ); }

/* per-digit Buffer/Inverter on A, carry-in from a binary buffer on S */
inline subcircuit addsub2_cell()
{
  subcircuit s{ "addsub2", { "S", "A0", "A1", "B0", "B1", "SUM0", "SUM1", "COUT" }, {}, {}, {} };
  s.instances.push_back( { "X0", "buffer_not", { "S", "A0", "AX0" } } );
  s.instances.push_back( { "X1", "buffer_not", { "S", "A1", "AX1" } } );
  s.macros.push_back( { "B1", macro_function::binbuf, { "S", "CIN" } } );
  s.macros.push_back( { "B2", macro_function::tfa, { "AX0", "B0", "CIN", "SUM0", "C1" } } );
  s.macros.push_back( { "B3", macro_function::tfa, { "AX1", "B1", "C1", "SUM1", "COUT" } } );
  return s;
}

/* S1 = 0 add, 1 increment (A + 1), 2 subtract (B - A) */
inline subcircuit arith_cell()
{
  subcircuit s{ "arith", { "S1", "A", "B", "CIN", "SUM", "CARRY" }, {}, {}, {} };
  s.instances.push_back( { "XI", "sti", { "A", "NA" } } );
  s.macros.push_back( { "B1", macro_function::binbuf, { "VDD", "ONE" } } );
  s.macros.push_back( { "B2", macro_function::mux3, { "S1", "A", "A", "NA", "AOP" } } );
  s.macros.push_back( { "B3", macro_function::mux3, { "S1", "B", "GND", "B", "BOP" } } );
  s.macros.push_back( { "B4", macro_function::mux3, { "S1", "CIN", "ONE", "ONE", "COP" } } );
  s.macros.push_back( { "B5", macro_function::tfa, { "AOP", "BOP", "COP", "SUM", "CARRY" } } );
  return s;
}

inline subcircuit alu1_cell()
{
  subcircuit s{ "alu1", { "S0", "S1", "A", "B", "CIN", "OUT", "COUT" }, {}, {}, {} };
  s.instances.push_back( { "XBN", "buffer_not", { "S0", "A", "LBN" } } );
  s.instances.push_back( { "XAN", "and_nand", { "S0", "A", "B", "LAN" } } );
  s.instances.push_back( { "XON", "or_nor", { "S0", "A", "B", "LON" } } );
  s.instances.push_back( { "XAR", "arith", { "S1", "A", "B", "CIN", "SUM", "CARRY" } } );
  s.instances.push_back( { "XCO", "buffer_not", { "C4", "CARRY", "COUT" } } );
  s.macros.push_back( { "B1", macro_function::mux3, { "S1", "LBN", "LAN", "LON", "LOGIC" } } );
  s.macros.push_back( { "B2", macro_function::mux3, { "S0", "LOGIC", "SUM", "LOGIC", "OUT" } } );
  s.macros.push_back( { "B3", macro_function::ctrl4, { "S0", "S1", "C4" } } );
  return s;
}

inline subcircuit logic_unit_cell()
{
  subcircuit s{ "logic_unit", { "S0", "S1", "A", "B", "OBN", "OAN", "OON" }, {}, {}, {} };
  s.instances.push_back( { "XBN", "buffer_not", { "C1", "A", "OBN" } } );
  s.instances.push_back( { "XAN", "and_nand", { "C2", "A", "B", "OAN" } } );
  s.instances.push_back( { "XON", "or_nor", { "C3", "A", "B", "OON" } } );
  s.macros.push_back( { "B1", macro_function::ctrl1, { "S0", "S1", "C1" } } );
  s.macros.push_back( { "B2", macro_function::ctrl2, { "S0", "S1", "C2" } } );
  s.macros.push_back( { "B3", macro_function::ctrl3, { "S0", "S1", "C3" } } );
  return s;
}

inline subcircuit arith_unit_cell()
{
  subcircuit s{ "arith_unit", { "S0", "S1", "A", "B", "CIN", "OUT", "COUT" }, {}, {}, {} };
  s.instances.push_back( { "XAR", "arith", { "S1", "A", "B", "CIN", "SUM", "CARRY" } } );
  s.instances.push_back( { "XSO", "buffer_not", { "C4", "SUM", "OUT" } } );
  s.instances.push_back( { "XCO", "buffer_not", { "C4", "CARRY", "COUT" } } );
  s.macros.push_back( { "B1", macro_function::ctrl4, { "S0", "S1", "C4" } } );
  return s;
}

/* the four unit outputs stay separate nets and are joined by bus resolution */
inline subcircuit alu2_cell()
{
  subcircuit s{ "alu2", { "S0", "S1", "A", "B", "CIN", "Y_BN", "Y_AN", "Y_ON", "Y_AR", "COUT" }, {}, {}, {} };
  s.instances.push_back( { "XLU", "logic_unit", { "S0", "S1", "A", "B", "Y_BN", "Y_AN", "Y_ON" } } );
  s.instances.push_back( { "XAU", "arith_unit", { "S0", "S1", "A", "B", "CIN", "Y_AR", "COUT" } } );
  return s;
}

inline std::map<std::string, std::function<subcircuit()>> const& cell_builders()
{
  static std::map<std::string, std::function<subcircuit()>> const builders = {
      { "nti", nti_cell },
      { "pti", pti_cell },
      { "sti", sti_cell },
      { "buffer_not", buffer_not_cell },
      { "ntnand", ntnand_cell },
      { "ptnand", ptnand_cell },
      { "ntnor", ntnor_cell },
      { "ptnor", ptnor_cell },
      { "and_nand", and_nand_cell },
      { "or_nor", or_nor_cell },
      { "addsub2", addsub2_cell },
      { "arith", arith_cell },
      { "alu1", alu1_cell },
      { "logic_unit", logic_unit_cell },
      { "arith_unit", arith_unit_cell },
      { "alu2", alu2_cell },
  };
  return builders;
}

/* top cell plus everything it instantiates, leaves first */
inline netlist library_netlist( std::string const& top )
{
  netlist n;
  n.top = top;
  std::function<void( std::string const& )> add = [&]( std::string const& name ) {
    if ( n.find( name ) )
      return;
    auto cell = cell_builders().at( name )();
    for ( auto const& x : cell.instances )
      add( x.cell );
    n.subcircuits.push_back( std::move( cell ) );
  };
  add( top );
  return n;
}

inline std::vector<trit> const& binary_carry() { static std::vector<trit> const d{ trit{ 0 }, trit{ 1 } }; return d; }
inline std::vector<trit> const& any_trit() { static std::vector<trit> const d{ trit{ 0 }, trit{ 1 }, trit{ 2 } }; return d; }

inline cell_entry alu_entry( std::string name, std::string description )
{
  cell_entry e{ name, std::move( description ), library_netlist( name ), {}, {} };
  e.options.domains = { any_trit(), any_trit(), any_trit(), any_trit(), binary_carry() };
  e.oracle = []( std::vector<trit> const& t ) {
    auto const r = alu_behavioral( t[0], t[1], t[2], t[3], t[4] );
    return std::vector<trit_hz>{ r.out, r.carry };
  };
  return e;
}

} // namespace detail

/*! \brief STI, PTI and NTI as two-transistor complementary inverters. */
inline std::array<cell_entry, 3> build_inverters()
{
  using detail::library_netlist;
  return { cell_entry{ "sti", "standard ternary inverter", library_netlist( "sti" ), {}, []( auto const& t ) { return std::vector<trit_hz>{ sti( t[0] ) }; } },
           cell_entry{ "pti", "positive ternary inverter", library_netlist( "pti" ), {}, []( auto const& t ) { return std::vector<trit_hz>{ pti( t[0] ) }; } },
           cell_entry{ "nti", "negative ternary inverter", library_netlist( "nti" ), {}, []( auto const& t ) { return std::vector<trit_hz>{ nti( t[0] ) }; } } };
}

inline cell_entry build_buffer_not()
{
  return { "buffer_not", "tri-state ternary Buffer/NOT (S=0 buffer, S=1 HZ, S=2 NOT)", detail::library_netlist( "buffer_not" ), {},
           []( auto const& t ) { return std::vector<trit_hz>{ tri_buffer_not( t[0], t[1] ) }; } };
}

inline cell_entry build_and_nand()
{
  return { "and_nand", "tri-state ternary AND/NAND (S=0 AND, S=1 HZ, S=2 NAND)", detail::library_netlist( "and_nand" ), {},
           []( auto const& t ) { return std::vector<trit_hz>{ tri_and_nand( t[0], t[1], t[2] ) }; } };
}

inline cell_entry build_or_nor()
{
  return { "or_nor", "tri-state ternary OR/NOR (S=0 OR, S=1 HZ, S=2 NOR)", detail::library_netlist( "or_nor" ), {},
           []( auto const& t ) { return std::vector<trit_hz>{ tri_or_nor( t[0], t[1], t[2] ) }; } };
}

/*! \brief Two-digit adder/subtractor; S = 1 is outside the cell's domain. */
inline cell_entry build_addsub2()
{
  cell_entry e{ "addsub2", "2-digit ternary adder/subtractor (S=0 A+B, S=2 B-A)", detail::library_netlist( "addsub2" ), {}, {} };
  e.options.domains = { { trit{ 0 }, trit{ 2 } }, detail::any_trit(), detail::any_trit(), detail::any_trit(), detail::any_trit() };
  e.oracle = []( std::vector<trit> const& t ) {
    auto const r = add_sub( t[0], ternary_word{ { t[1], t[2] } }, ternary_word{ { t[3], t[4] } } );
    return std::vector<trit_hz>{ r.out[0], r.out[1], r.carry };
  };
  return e;
}

inline cell_entry build_alu1() { return detail::alu_entry( "alu1", "multiplexer-based ternary ALU" ); }

inline cell_entry build_alu2()
{
  auto e = detail::alu_entry( "alu2", "tri-state ternary ALU (units share the output through HZ)" );
  e.options.groups = { { "OUT", { "Y_BN", "Y_AN", "Y_ON", "Y_AR" } }, { "COUT", { "COUT" } } };
  return e;
}

/*! \brief Every library cell, in a fixed order. */
inline std::vector<cell_entry> const& library()
{
  static std::vector<cell_entry> const cells = [] {
    std::vector<cell_entry> v;
    for ( auto& c : build_inverters() )
      v.push_back( std::move( c ) );
    v.push_back( build_buffer_not() );
    v.push_back( build_and_nand() );
    v.push_back( build_or_nor() );
    v.push_back( build_addsub2() );
    v.push_back( build_alu1() );
    v.push_back( build_alu2() );
    return v;
  }();
  return cells;
}

inline cell_entry const* find_cell( std::string_view name )
{
  for ( auto const& c : library() )
    if ( c.name == name )
      return &c;
  return nullptr;
}

/* instance prefixes of the ALU2 logic and arithmetic units */
inline constexpr std::string_view alu2_logic_unit = "XLU/";
inline constexpr std::string_view alu2_arith_unit = "XAU/";

} // namespace tcnfet
