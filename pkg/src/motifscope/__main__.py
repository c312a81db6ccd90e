from motifscope.cli import main

main()
