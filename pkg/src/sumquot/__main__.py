from sumquot.cli import main

main()
