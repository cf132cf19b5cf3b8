from condorcet.cli import main

main()
