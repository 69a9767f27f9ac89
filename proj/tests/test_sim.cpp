#include <catch_amalgamated.hpp>

#include <tcnfet/tcnfet.hpp>

using namespace tcnfet;

namespace
{

trit T( int v ) { return trit{ v }; }
trit_hz H( int v ) { return trit_hz{ trit{ v } }; }

solve_error::kind failure_kind( std::function<void()> const& f )
{
  try
  {
    f();
  }
  catch ( solve_error const& e )
  {
    return e.what_kind();
  }
  FAIL( "expected a solve error" );
  return solve_error::kind::oscillation;
}

} // namespace

TEST_CASE( "classify voltages into logic bands", "[sim]" )
{
  solve_config const cfg;
  CHECK( classify_voltage( 0.0, cfg ) == T( 0 ) );
  CHECK( classify_voltage( 0.45, cfg ) == T( 1 ) );
  CHECK( classify_voltage( 0.9, cfg ) == T( 2 ) );
  CHECK( classify_voltage( 0.89, cfg ) == T( 2 ) );
  CHECK( failure_kind( [&] { classify_voltage( 0.30, cfg ); } ) == solve_error::kind::invalid_level );
  CHECK( level_voltage( T( 1 ), 0.8 ) == 0.4 );
}

TEST_CASE( "bus resolution", "[sim]" )
{
  auto const Z = trit_hz::hz();
  CHECK( resolve_bus( { Z, Z, H( 2 ) } ) == H( 2 ) );
  CHECK( resolve_bus( { Z, Z, Z } ) == Z );
  CHECK( resolve_bus( { H( 1 ), H( 1 ), Z } ) == H( 1 ) );
  CHECK( resolve_bus( {} ) == Z );
  CHECK( failure_kind( [&] { resolve_bus( { H( 0 ), H( 2 ) } ); } ) == solve_error::kind::contention );
}

TEST_CASE( "solve the standard inverter", "[sim]" )
{
  auto const f = find_cell( "sti" )->flatten();
  for ( int a = 0; a < 3; ++a )
  {
    std::vector<trit_hz> in{ H( a ) };
    auto const r = solve( f, in );
    REQUIRE( r.outputs.size() == 1 );
    CHECK( r.outputs[0] == H( 2 - a ) );
    /* only the mid level divides */
    CHECK( r.static_path_count == ( a == 1 ? 1u : 0u ) );
  }
  auto const r = solve( f, std::map<std::string, trit_hz>{ { "IN", H( 1 ) } } );
  CHECK( r.nodes[f.at( "OUT" )].voltage == Catch::Approx( 0.45 ) );
  CHECK( failure_kind( [&] { solve( f, std::map<std::string, trit_hz>{} ); } ) == solve_error::kind::missing_input );
  CHECK( failure_kind( [&] { solve( f, std::map<std::string, trit_hz>{ { "IN", trit_hz::hz() } } ); } ) == solve_error::kind::hz_input );
}

TEST_CASE( "solve is deterministic and converges quickly", "[sim][property]" )
{
  for ( auto const& c : library() )
  {
    INFO( c.name );
    auto const f = c.flatten();
    auto domains = c.options.domains;
    if ( domains.empty() )
      domains.assign( f.inputs.size(), detail::any_trit() );
    for ( auto const& tuple : detail::enumerate_tuples( domains ) )
    {
      std::vector<trit_hz> in( tuple.begin(), tuple.end() );
      auto const r1 = solve( f, in );
      auto const r2 = solve( f, in );
      CHECK( r1 == r2 );
      CHECK( r1.iterations <= 10 );
    }
  }
}

TEST_CASE( "truth table of the buffer matches its table", "[sim]" )
{
  auto const t = truth_table( find_cell( "buffer_not" )->flatten() );
  REQUIRE( t.rows.size() == 9 );
  char const* const expected = "012ZZZ210";
  for ( std::size_t i = 0; i < 9; ++i )
  {
    CHECK( t.rows[i].inputs == std::vector<trit>{ T( int( i / 3 ) ), T( int( i % 3 ) ) } );
    CHECK( t.rows[i].outputs[0].symbol() == expected[i] );
  }
  CHECK( to_csv( t ) == "S,IN,OUT\n0,0,0\n0,1,1\n0,2,2\n1,0,Z\n1,1,Z\n1,2,Z\n2,0,2\n2,1,1\n2,2,0\n" );
}

TEST_CASE( "restricted domains", "[sim]" )
{
  auto const f = find_cell( "and_nand" )->flatten();
  table_options opt;
  opt.domains = { { T( 0 ) }, detail::any_trit(), detail::any_trit() };
  auto const t = truth_table( f, {}, opt );
  REQUIRE( t.rows.size() == 9 );
  for ( auto const& r : t.rows )
    CHECK( r.outputs[0] == trit_hz{ t_min( r.inputs[1], r.inputs[2] ) } );

  opt.domains = { { T( 1 ) }, detail::any_trit(), detail::any_trit() };
  for ( auto const& r : truth_table( find_cell( "or_nor" )->flatten(), {}, opt ).rows )
    CHECK( r.outputs[0].is_hz() );
}

TEST_CASE( "enumeration cap", "[sim]" )
{
  std::string text = ".subckt wide A B C D E F G OUT\nMP OUT A VDD P (10,0)\n";
  for ( char c = 'A'; c <= 'G'; ++c )
    text += std::string( "MN" ) + c + " OUT " + c + " GND N (10,0)\n";
  auto const f = elaborate( parse_netlist( text + ".ends\n" ) );
  CHECK( f.inputs.size() == 7 );
  CHECK( failure_kind( [&] { truth_table( f ); } ) == solve_error::kind::enumeration_cap );
}

TEST_CASE( "solve errors name the failing tuple", "[sim]" )
{
  /* the binary buffer rejects the mid level */
  auto const f = elaborate( parse_netlist( ".subckt c A Y\nB1 BINBUF A Y\n.ends\n" ) );
  try
  {
    truth_table( f );
    FAIL( "expected a solve error" );
  }
  catch ( solve_error const& e )
  {
    CHECK( e.what_kind() == solve_error::kind::macro_domain );
    CHECK( e.tuple() == std::vector<trit>{ T( 1 ) } );
    CHECK( std::string( e.what() ).rfind( "A=1: ", 0 ) == 0 );
  }
}

TEST_CASE( "macros in isolation", "[sim]" )
{
  auto const tfa = elaborate( parse_netlist( ".subckt c A B CI S CO\nB1 TFA A B CI S CO\n.ends\n" ) );
  for ( int a = 0; a < 3; ++a )
    for ( int b = 0; b < 3; ++b )
      for ( int c = 0; c < 2; ++c )
      {
        std::vector<trit_hz> in{ H( a ), H( b ), H( c ) };
        auto const r = solve( tfa, in );
        CHECK( r.outputs[0] == H( ( a + b + c ) % 3 ) );
        CHECK( r.outputs[1] == H( ( a + b + c ) / 3 ) );
      }
  std::vector<trit_hz> bad{ H( 0 ), H( 0 ), H( 2 ) };
  CHECK( failure_kind( [&] { solve( tfa, bad ); } ) == solve_error::kind::macro_domain );

  auto const bin = elaborate( parse_netlist( ".subckt c A Y\nB1 BINBUF A Y\n.ends\n" ) );
  CHECK( solve( bin, std::vector<trit_hz>{ H( 2 ) } ).outputs[0] == H( 1 ) );
  CHECK( failure_kind( [&] { solve( bin, std::vector<trit_hz>{ H( 1 ) } ); } ) == solve_error::kind::macro_domain );
}

TEST_CASE( "feedback loops that never settle are reported", "[sim]" )
{
  /* K pulls Y low, the loop through X alternately adds and removes the pull-up,
     so Y flips between 0 and the mid level on every sweep */
  auto const ring = elaborate( parse_netlist( ".subckt ring K X\n"
                                              "M1 Y X VDD P (10,0)\n"
                                              "M2 Y X GND N (10,0)\n"
                                              "M3 Y K GND N (10,0)\n"
                                              "B1 MUX3 K Y Y Y X\n"
                                              ".ends\n" ) );
  solve_config cfg;
  cfg.max_iterations = 20;
  CHECK( failure_kind( [&] { solve( ring, std::vector<trit_hz>{ H( 2 ) }, cfg ); } ) == solve_error::kind::oscillation );

  /* with K low nothing ever drives the loop, so it settles floating */
  cfg.strict_hz_inputs = false;
  auto const r = solve( ring, std::vector<trit_hz>{ H( 0 ) }, cfg );
  CHECK( r.outputs[0].is_hz() );
}

TEST_CASE( "voltage transfer staircases", "[sim][property]" )
{
  auto const f = find_cell( "buffer_not" )->flatten();
  for ( double vdd : { 0.8, 0.9, 1.0 } )
  {
    solve_config cfg;
    cfg.vdd = vdd;
    auto const buf = vtc_sweep( f, "IN", { { "S", T( 0 ) } }, 1000, cfg );
    auto const inv = vtc_sweep( f, "IN", { { "S", T( 2 ) } }, 1000, cfg );
    auto const hz = vtc_sweep( f, "IN", { { "S", T( 1 ) } }, 50, cfg );
    REQUIRE( buf.size() == 1000 );
    for ( std::size_t i = 1; i < buf.size(); ++i )
    {
      REQUIRE( buf[i].v_out );
      REQUIRE( inv[i].v_out );
      CHECK( *buf[i].v_out >= *buf[i - 1].v_out );
      CHECK( *inv[i].v_out <= *inv[i - 1].v_out );
    }
    CHECK( buf.front().v_in == 0.0 );
    CHECK( buf.back().v_in == vdd );
    CHECK( *buf.front().v_out == 0.0 );
    CHECK( *buf.back().v_out == vdd );
    CHECK( *inv.front().v_out == vdd );
    CHECK( *inv.back().v_out == 0.0 );
    for ( auto const& p : hz )
      CHECK_FALSE( p.v_out.has_value() );
  }
  CHECK_THROWS_AS( vtc_sweep( f, "IN", { { "S", T( 0 ) } }, 1 ), std::invalid_argument );
  CHECK( failure_kind( [&] { vtc_sweep( f, "IN", {}, 10 ); } ) == solve_error::kind::missing_input );
}

TEST_CASE( "voltage transfer endpoints agree with the truth table", "[sim][property]" )
{
  for ( auto const* name : { "sti", "pti", "nti" } )
  {
    auto const f = find_cell( name )->flatten();
    auto const table = truth_table( f );
    auto const series = vtc_sweep( f, "IN", {}, 3 );
    for ( std::size_t i = 0; i < 3; ++i )
      CHECK( classify_voltage( *series[i].v_out, {} ) == table.rows[i].outputs[0].value() );
  }
}

TEST_CASE( "static paths and power proxy", "[sim]" )
{
  auto const f = find_cell( "buffer_not" )->flatten();
  for ( int in = 0; in < 3; ++in )
  {
    std::vector<trit_hz> v{ H( 1 ), H( in ) };
    CHECK( static_power_proxy( solve( f, v ) ) == 0 );
  }
  auto const mid = solve( f, std::vector<trit_hz>{ H( 0 ), H( 1 ) } );
  CHECK( static_power_proxy( mid ) >= 1 );
  REQUIRE_FALSE( mid.static_paths.empty() );
  for ( auto const& path : mid.static_paths )
    CHECK_FALSE( path.empty() );

  auto const g = find_cell( "and_nand" )->flatten();
  CHECK( static_power_proxy( solve( g, std::vector<trit_hz>{ H( 0 ), H( 2 ), H( 2 ) } ) ) == 0 );
}

TEST_CASE( "Monte-Carlo reports", "[sim]" )
{
  std::vector<mc_cell> cells;
  for ( auto const* name : { "buffer_not", "and_nand", "or_nor" } )
  {
    auto const& c = *find_cell( name );
    cells.push_back( { c.name, c.flatten(), c.oracle, c.options } );
  }

  auto const a = monte_carlo( cells, {}, 100, 7, {} );
  auto const b = monte_carlo( cells, {}, 100, 7, {} );
  CHECK( a == b );
  CHECK( a.failures == 0 );
  CHECK( a.cells.size() == 3 );

  /* zero spread is the nominal circuit */
  auto const nominal = monte_carlo( cells, { 0.0, 3.0 }, 1, 1, {} );
  CHECK( nominal.failures == 0 );

  /* a spread that pushes the low-threshold tube past the mid level must be caught */
  auto const wide = monte_carlo( cells, { 0.25, 3.0 }, 50, 42, {} );
  CHECK( wide.failures > 0 );
  CHECK( monte_carlo( cells, { 0.25, 3.0 }, 50, 43, {} ) != wide );

  CHECK_THROWS_AS( monte_carlo( cells, {}, 0, 1, {} ), std::invalid_argument );
}
