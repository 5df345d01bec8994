from stokes_sd.cli import main

main()
