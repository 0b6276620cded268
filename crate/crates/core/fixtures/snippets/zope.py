import zope.interface

class Interface(zope.interface.Interface):
    attr = zope.interface.Attribute('Attribute')
