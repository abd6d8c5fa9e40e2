from fairlens.cli import main

main()
