from PIL import Image

img = Image.new('RGB', (64, 64))
img.save('out.png')
