// Simulate a library cell, sweep its transfer curve and evaluate the ALU.

#include <tcnfet/tcnfet.hpp>

#include <iostream>

int main()
{
  using namespace tcnfet;

  /* exhaustive switch-level table of the tri-state Buffer/NOT */
  auto const cell = build_buffer_not();
  std::cout << to_csv( cell.simulate() ) << "\n";

  /* inverter-mode transfer curve, 5 points */
  auto const flat = cell.flatten();
  std::cout << to_csv( vtc_sweep( flat, "IN", { { "S", trit{ 2 } } }, 5 ) ) << "\n";

  /* static VDD-to-GND paths: none while the gate is idle */
  for ( int s = 0; s < 3; ++s )
  {
    auto const r = solve( flat, std::map<std::string, trit_hz>{ { "S", trit{ s } }, { "IN", trit{ 1 } } } );
    std::cout << "S=" << s << " IN=1 -> OUT=" << r.outputs[0].symbol() << ", static paths " << static_power_proxy( r ) << "\n";
  }

  /* subtract on the tri-state ALU: B - A = 1 - 2 */
  auto const alu = build_alu2().simulate();
  for ( auto const& row : alu.rows )
    if ( row.inputs == std::vector<trit>{ trit{ 1 }, trit{ 2 }, trit{ 2 }, trit{ 1 }, trit{ 0 } } )
      std::cout << "ALU 1 2 2 1 0 -> OUT=" << row.outputs[0].symbol() << " COUT=" << row.outputs[1].symbol() << "\n";
}
