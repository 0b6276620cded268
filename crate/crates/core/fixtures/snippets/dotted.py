import xml.etree.ElementTree
import matplotlib.pyplot
