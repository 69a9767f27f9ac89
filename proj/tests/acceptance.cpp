// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <tcnfet/tcnfet.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace tcnfet;

namespace
{

/* tolerances and limits */
constexpr double diameter_tolerance_nm = 0.001;
constexpr double threshold_tolerance_v = 0.001;
constexpr double nominal_vdd = 0.9;
constexpr double sweep_vdds[] = { 0.8, 0.9, 1.0 };
constexpr std::size_t mc_trials = 1000;
constexpr std::uint64_t mc_seed = 42;
constexpr std::size_t vtc_steps = 1000;

trit T( int v ) { return trit{ v }; }

/* collects failure notes for one criterion */
struct verdict
{
  std::vector<std::string> notes;

  void expect( bool ok, std::string const& what )
  {
    if ( !ok && notes.size() < 5 )
      notes.push_back( what );
    failed |= !ok;
  }

  bool failed{ false };
};

solve_config at( double vdd )
{
  solve_config cfg;
  cfg.vdd = vdd;
  return cfg;
}

std::string fmt( double v )
{
  std::ostringstream os;
  os << v;
  return os.str();
}

/* ---- criteria ---- */

void device_formulas( verdict& v )
{
  struct row
  {
    chirality tube;
    double d, vth;
  };
  for ( auto const& r : { row{ high_vth_tube, 0.783, 0.557 }, row{ low_vth_tube, 1.487, 0.293 } } )
  {
    double const d = cnt_diameter( r.tube );
    double const vth = cnfet_threshold( d );
    v.expect( std::abs( d - r.d ) <= diameter_tolerance_nm, r.tube.to_string() + " diameter " + fmt( d ) );
    v.expect( std::abs( vth - r.vth ) <= threshold_tolerance_v, r.tube.to_string() + " threshold " + fmt( vth ) );
  }
}

void algebra_laws( verdict& v )
{
  for ( auto a : trit::all() )
  {
    v.expect( t_not( t_not( a ) ) == a, "involution" );
    v.expect( t_max( a, a ) == a && t_min( a, a ) == a, "idempotence" );
    for ( auto b : trit::all() )
    {
      v.expect( t_max( a, b ) == t_max( b, a ) && t_min( a, b ) == t_min( b, a ), "commutativity" );
      v.expect( t_min( a, t_max( a, b ) ) == a && t_max( a, t_min( a, b ) ) == a, "absorption" );
      v.expect( t_not( t_min( a, b ) ) == t_max( t_not( a ), t_not( b ) ), "De Morgan (min)" );
      v.expect( t_not( t_max( a, b ) ) == t_min( t_not( a ), t_not( b ) ), "De Morgan (max)" );
      for ( auto c : trit::all() )
      {
        v.expect( t_max( a, t_max( b, c ) ) == t_max( t_max( a, b ), c ), "associativity (max)" );
        v.expect( t_min( a, t_min( b, c ) ) == t_min( t_min( a, b ), c ), "associativity (min)" );
      }
    }
  }
}

void buffer_table( verdict& v, double vdd )
{
  /* rows (S, IN) in order 00 .. 22 */
  char const* const expected = "012ZZZ210";
  auto const t = build_buffer_not().simulate( at( vdd ) );
  v.expect( t.rows.size() == 9, "row count" );
  for ( std::size_t i = 0; i < t.rows.size() && i < 9; ++i )
    v.expect( t.rows[i].outputs[0].symbol() == expected[i],
              "VDD " + fmt( vdd ) + " S=" + t.rows[i].inputs[0].symbol() + " IN=" + t.rows[i].inputs[1].symbol() );
}

void two_input_gates( verdict& v, double vdd )
{
  for ( auto const& c : { build_and_nand(), build_or_nor() } )
  {
    auto const t = c.simulate( at( vdd ) );
    v.expect( t.rows.size() == 27, c.name + " row count" );
    std::map<std::vector<trit>, trit_hz> got;
    for ( auto const& r : t.rows )
    {
      auto const want = c.oracle( r.inputs )[0];
      v.expect( r.outputs[0] == want, c.name + " VDD " + fmt( vdd ) + " " + detail::tuple_label( t.input_names, r.inputs ) );
      got[r.inputs] = r.outputs[0];
    }
    for ( auto a : trit::all() )
      for ( auto b : trit::all() )
      {
        auto const f = got[{ T( 0 ), a, b }];
        auto const g = got[{ T( 2 ), a, b }];
        v.expect( !f.is_hz() && g == trit_hz{ t_not( f.value() ) }, c.name + " complement pair" );
        v.expect( got[{ T( 1 ), a, b }].is_hz(), c.name + " S=1 not HZ" );
      }
  }
}

void supply_sweep( verdict& v )
{
  for ( double vdd : sweep_vdds )
  {
    buffer_table( v, vdd );
    two_input_gates( v, vdd );
  }
}

void adder_subtractor( verdict& v )
{
  auto const f = build_addsub2().flatten();
  for ( int mode : { 0, 2 } )
    for ( int a = 0; a < 9; ++a )
      for ( int b = 0; b < 9; ++b )
      {
        std::vector<trit_hz> const in{ T( mode ), T( a % 3 ), T( a / 3 ), T( b % 3 ), T( b / 3 ) };
        auto const r = solve( f, in, at( nominal_vdd ) );
        int const out = r.outputs[0].value().value() + 3 * r.outputs[1].value().value();
        int const cout = r.outputs[2].value().value();
        auto const tag = " a=" + std::to_string( a ) + " b=" + std::to_string( b );
        if ( mode == 0 )
          v.expect( out == ( a + b ) % 9 && cout == ( a + b ) / 9, "add" + tag );
        else
          v.expect( out == ( ( b - a ) % 9 + 9 ) % 9 && cout == ( b >= a ? 1 : 0 ), "subtract" + tag );
      }
}

void alu_equivalence( verdict& v )
{
  auto const cfg = at( nominal_vdd );
  auto const alu1 = build_alu1().simulate( cfg );
  truth_table_result alu2;
  try
  {
    alu2 = build_alu2().simulate( cfg ); /* resolves the shared output, raising on contention */
  }
  catch ( solve_error const& e )
  {
    v.expect( false, std::string( "ALU2: " ) + e.what() );
    return;
  }
  v.expect( alu1.rows.size() == 162 && alu2.rows.size() == 162, "row count" );
  for ( std::size_t i = 0; i < alu1.rows.size() && i < alu2.rows.size(); ++i )
  {
    auto const& in = alu1.rows[i].inputs;
    auto const b = alu_behavioral( in[0], in[1], in[2], in[3], in[4] );
    std::vector<trit_hz> const want{ b.out, b.carry };
    auto const label = detail::tuple_label( alu1.input_names, in );
    v.expect( alu1.rows[i].outputs == want, "ALU1 " + label );
    v.expect( alu2.rows[i].inputs == in && alu2.rows[i].outputs == want, "ALU2 " + label );
  }

  /* exactly one unit drives the shared output in every configuration */
  auto const f = build_alu2().flatten();
  for ( auto const& row : alu2.rows )
  {
    std::vector<trit_hz> const in( row.inputs.begin(), row.inputs.end() );
    auto const r = solve( f, in, cfg );
    std::size_t active = 0;
    for ( auto const* name : { "Y_BN", "Y_AN", "Y_ON", "Y_AR" } )
      active += r.nodes[f.at( name )].drive == drive_state::driven ? 1 : 0;
    v.expect( active <= 1, "units driving " + detail::tuple_label( alu2.input_names, row.inputs ) );
  }
}

std::string render( mc_report const& r )
{
  std::ostringstream os;
  os.precision( 17 );
  os << "trials " << r.trials << " failures " << r.failures << " seed " << r.seed << " sigma " << r.perturbation.sigma_fraction << " trunc "
     << r.perturbation.truncation << " vdd " << r.vdd << "\n";
  for ( auto const& c : r.cells )
  {
    os << c.name << " " << c.failures;
    for ( auto const& t : c.failing_tuples )
    {
      os << " ";
      for ( auto x : t )
        os << x.symbol();
    }
    os << "\n";
  }
  return os.str();
}

void monte_carlo_robustness( verdict& v )
{
  std::vector<mc_cell> cells;
  for ( auto const& c : { build_buffer_not(), build_and_nand(), build_or_nor() } )
    cells.push_back( { c.name, c.flatten(), c.oracle, c.options } );
  diameter_perturbation const pert{ 0.05, 3.0 };
  auto const first = monte_carlo( cells, pert, mc_trials, mc_seed, at( nominal_vdd ) );
  auto const second = monte_carlo( cells, pert, mc_trials, mc_seed, at( nominal_vdd ) );
  v.expect( first.failures == 0, "functional failures: " + std::to_string( first.failures ) );
  v.expect( render( first ) == render( second ), "report differs between runs with the same seed" );
}

void static_power( verdict& v )
{
  for ( auto const& c : { build_buffer_not(), build_and_nand(), build_or_nor() } )
    for ( auto const& r : c.simulate( at( nominal_vdd ) ).rows )
    {
      if ( r.outputs[0].is_hz() )
        v.expect( r.static_paths == 0, c.name + " HZ row with static paths" );
      if ( r.outputs[0] == trit_hz{ T( 1 ) } )
        v.expect( r.static_paths >= 1, c.name + " mid-level row without a divider" );
    }

  auto const f = build_alu2().flatten();
  auto const cell = build_alu2();
  for ( auto const& tuple : detail::enumerate_tuples( cell.options.domains ) )
  {
    if ( tuple[0] != T( 1 ) )
      continue;
    std::vector<trit_hz> const in( tuple.begin(), tuple.end() );
    auto const r = solve( f, in, at( nominal_vdd ) );
    v.expect( static_paths_through( f, r, alu2_logic_unit ) == 0, "logic unit conducts in arithmetic row" );
  }
}

/* the harness's own reader for `v_in,v_out` series */
std::optional<std::vector<vtc_point>> read_vtc_csv( std::string const& text )
{
  std::istringstream is( text );
  std::string line;
  if ( !std::getline( is, line ) || line != "v_in,v_out" )
    return std::nullopt;
  std::vector<vtc_point> pts;
  while ( std::getline( is, line ) )
  {
    auto const comma = line.find( ',' );
    if ( comma == std::string::npos )
      return std::nullopt;
    auto const a = line.substr( 0, comma ), b = line.substr( comma + 1 );
    char* end = nullptr;
    double const vin = std::strtod( a.c_str(), &end );
    if ( *end )
      return std::nullopt;
    std::optional<double> vout;
    if ( b != "Z" )
    {
      vout = std::strtod( b.c_str(), &end );
      if ( *end )
        return std::nullopt;
    }
    pts.push_back( { vin, vout } );
  }
  return pts;
}

void vtc_staircases( verdict& v )
{
  auto const cfg = at( nominal_vdd );
  auto const f = build_buffer_not().flatten();
  auto const table = build_buffer_not().simulate( cfg );
  for ( int s : { 0, 2 } )
  {
    auto const series = vtc_sweep( f, "IN", { { "S", T( s ) } }, vtc_steps, cfg );
    bool monotone = true;
    for ( std::size_t i = 1; i < series.size(); ++i )
    {
      if ( !series[i].v_out || !series[i - 1].v_out )
      {
        monotone = false;
        continue;
      }
      monotone &= s == 0 ? *series[i].v_out >= *series[i - 1].v_out : *series[i].v_out <= *series[i - 1].v_out;
    }
    v.expect( monotone, s == 0 ? "buffer sweep not non-decreasing" : "inverter sweep not non-increasing" );

    /* endpoints against the table rows (S, 0) and (S, 2) */
    auto const lo = table.rows[s * 3].outputs[0];
    auto const hi = table.rows[s * 3 + 2].outputs[0];
    v.expect( series.front().v_out && classify_voltage( *series.front().v_out, cfg ) == lo.value(), "low endpoint" );
    v.expect( series.back().v_out && classify_voltage( *series.back().v_out, cfg ) == hi.value(), "high endpoint" );

    auto const parsed = read_vtc_csv( to_csv( series ) );
    v.expect( parsed && *parsed == series, "CSV does not round-trip" );
  }
}

void netlist_round_trip( verdict& v )
{
  for ( auto const& c : library() )
  {
    auto const once = to_text( c.net );
    auto const twice = to_text( parse_netlist( once ) );
    v.expect( once == twice, c.name + " emit/parse/emit differs" );
  }
}

struct criterion
{
  int id;
  char const* title;
  double limit_s;
  std::function<void( verdict& )> check;
};

} // namespace

int main()
{
  std::vector<criterion> const criteria = {
      { 1, "device formulas for (10,0) and (19,0)", 1.0, device_formulas },
      { 2, "ternary algebra laws, exhaustive", 1.0, algebra_laws },
      { 3, "Buffer/NOT truth table at 0.9 V", 1.0, []( verdict& v ) { buffer_table( v, nominal_vdd ); } },
      { 4, "AND/NAND and OR/NOR oracles and complement pairs", 1.0, []( verdict& v ) { two_input_gates( v, nominal_vdd ); } },
      { 5, "gates unchanged at 0.8, 0.9 and 1.0 V", 5.0, supply_sweep },
      { 6, "2-digit adder/subtractor vs integers", 5.0, adder_subtractor },
      { 7, "ALU1 = ALU2 = behavioral, single bus driver", 10.0, alu_equivalence },
      { 8, "Monte-Carlo, 1000 trials, sigma 5 %, 3 sigma", 60.0, monte_carlo_robustness },
      { 9, "static-path proxy: HZ idle, mid level divides, idle logic unit", 5.0, static_power },
      { 10, "VTC staircases, endpoints and CSV round-trip", 5.0, vtc_staircases },
      { 11, "netlist emit/parse/emit fixpoint", 1.0, netlist_round_trip },
  };

  int failures = 0;
  for ( auto const& c : criteria )
  {
    verdict v;
    auto const t0 = std::chrono::steady_clock::now();
    try
    {
      c.check( v );
    }
    catch ( std::exception const& e )
    {
      v.expect( false, std::string( "exception: " ) + e.what() );
    }
    double const secs = std::chrono::duration<double>( std::chrono::steady_clock::now() - t0 ).count();
    v.expect( secs <= c.limit_s, "runtime " + fmt( secs ) + " s exceeds " + fmt( c.limit_s ) + " s" );

    std::printf( "%s  AC%-2d %-66s %8.3f s\n", v.failed ? "FAIL" : "PASS", c.id, c.title, secs );
    for ( auto const& n : v.notes )
      std::printf( "        %s\n", n.c_str() );
    failures += v.failed ? 1 : 0;
  }
  std::printf( "%d of %zu criteria passed\n", static_cast<int>( criteria.size() ) - failures, criteria.size() );
  return failures == 0 ? 0 : 1;
}
