important = 1
fromage = 2
import real_one
