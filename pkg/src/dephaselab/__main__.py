from dephaselab.cli import console_main

console_main()
