"""python -m dadc"""
from .cli import main

main()
