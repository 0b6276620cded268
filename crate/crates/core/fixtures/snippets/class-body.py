class A(object):
    import lxml.etree as et
