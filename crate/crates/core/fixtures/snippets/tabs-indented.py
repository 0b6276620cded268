if x:
	import boto3
