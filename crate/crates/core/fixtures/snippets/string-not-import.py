s = 'import fake'
t = """
import alsofake
"""
import real
